#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace casiam {

/// Raised for inputs that violate an operation's preconditions. The CLI maps
/// this to exit code 2; anything else escaping is treated as an internal error.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box in center convention. Pixel centers sit at integer
/// coordinates, so the box covers [cx - w/2, cx + w/2] horizontally.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  bool valid() const { return w > 0.0 && h > 0.0; }
  double area() const { return w * h; }
  Point2 center() const { return {cx, cy}; }

  bool operator==(const BoundingBox&) const = default;
};

/// Intersection over union of two boxes, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);
/// Euclidean distance between box centers.
double center_error(const BoundingBox& a, const BoundingBox& b);

/// Channel-major 3-D float array, row-major within each channel.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, float fill = 0.0f);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::span<float> plane(int c);
  std::span<const float> plane(int c) const;

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// 8-bit-range image stored as floats in [0, 255], planar (channel-major).
/// Channels are 1 (grayscale) or 3 (RGB, in that order).
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  float& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
  const float& at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::span<float> plane(int c);
  std::span<const float> plane(int c) const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Dense 2-D float grid (score maps).
struct ScoreGrid {
  int rows = 0;
  int cols = 0;
  std::vector<float> values;

  ScoreGrid() = default;
  ScoreGrid(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}

  float& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  float at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

}  // namespace casiam

#include "casiam/types.hpp"

#include <algorithm>
#include <cmath>

namespace casiam {

double iou(const BoundingBox& a, const BoundingBox& b) {
  // Edge differences below can round away the last ulp of an exact overlap.
  if (a == b) return a.valid() ? 1.0 : 0.0;
  const double ix = std::min(a.cx + 0.5 * a.w, b.cx + 0.5 * b.w) -
                    std::max(a.cx - 0.5 * a.w, b.cx - 0.5 * b.w);
  const double iy = std::min(a.cy + 0.5 * a.h, b.cy + 0.5 * b.h) -
                    std::max(a.cy - 0.5 * a.h, b.cy - 0.5 * b.h);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double center_error(const BoundingBox& a, const BoundingBox& b) {
  return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

Tensor3::Tensor3(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 1 || height < 1 || width < 1) {
    throw InputError("Tensor3 dimensions must be >= 1, got " + std::to_string(channels) + "x" +
                     std::to_string(height) + "x" + std::to_string(width));
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

std::span<float> Tensor3::plane(int c) {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  return std::span<float>(data_).subspan(c * n, n);
}

std::span<const float> Tensor3::plane(int c) const {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  return std::span<const float>(data_).subspan(c * n, n);
}

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1) {
    throw InputError("image dimensions must be >= 1");
  }
  if (channels != 1 && channels != 3) {
    throw InputError("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

std::span<float> Image::plane(int c) {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  return std::span<float>(data_).subspan(c * n, n);
}

std::span<const float> Image::plane(int c) const {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  return std::span<const float>(data_).subspan(c * n, n);
}

}  // namespace casiam

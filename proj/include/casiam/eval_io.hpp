#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "casiam/config.hpp"
#include "casiam/types.hpp"

namespace casiam {

struct Sequence {
  std::string name;
  std::vector<Image> frames;
  std::vector<BoundingBox> gt;  // one box (init only) or one per frame

  bool annotated() const { return !frames.empty() && gt.size() == frames.size(); }
};

// Ground-truth convention: "x,y,w,h" with (x, y) the top-left pixel, so the
// center is x + (w - 1) / 2.
BoundingBox box_from_xywh(double x, double y, double w, double h);
std::array<double, 4> to_xywh(const BoundingBox& box);

/// One box per line from the first four fields; comma, tab or space
/// separated. Blank lines and lines starting with '#' are skipped.
std::vector<BoundingBox> parse_boxes(std::string_view text, std::string_view source = "<text>");
std::vector<BoundingBox> read_boxes(const std::filesystem::path& path);
std::string format_box(const BoundingBox& box);
/// Writes boxes in ground-truth format, optionally preceded by "# header".
void write_boxes(const std::filesystem::path& path, std::span<const BoundingBox> boxes,
                 std::string_view header = {});

/// Reads <dir>/img/* (lexicographic order; png, jpg, jpeg, bmp) and
/// <dir>/groundtruth_rect.txt (or groundtruth.txt).
Sequence load_sequence(const std::filesystem::path& dir);
/// Writes <dir>/img/00001.png ... and <dir>/groundtruth_rect.txt.
void save_sequence(const Sequence& seq, const std::filesystem::path& dir);

struct BlobSpec {
  double cx = 80.0;
  double cy = 120.0;
  double w = 31.0;
  double h = 31.0;
  std::array<float, 3> color{230.0f, 90.0f, 60.0f};
  double vx = 3.0;
  double vy = 0.0;
};

struct SynthSpec {
  std::string name = "synthetic";
  int width = 320;
  int height = 240;
  int frames = 50;
  BlobSpec target;
  std::optional<BlobSpec> distractor;
  double zoom = 1.0;  // per-frame side growth of both blobs
  double noise = 4.0;  // Gaussian pixel noise sigma
  float background = 60.0f;
  std::uint64_t seed = 1;
};

/// Keys: name, frame.width, frame.height, frame.count, zoom, noise,
/// background, seed, target.{cx,cy,w,h,vx,vy,r,g,b}, and the same under
/// distractor.* (any distractor key enables the distractor).
SynthSpec synth_spec_from(const KeyValues& kv);

/// Renders each blob as an anti-aliased rectangle with a darker half-size core,
/// distractor first, target on top. Pixel values are integers. Throws
/// InputError if either blob leaves the frame at any frame.
Sequence synth_sequence(const SynthSpec& spec);

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

/// Fraction of frames with center error <= t for t = 0..50 px.
Curve precision_curve(std::span<const BoundingBox> results, std::span<const BoundingBox> gt);
/// Value at 20 px.
double precision_at_20(const Curve& precision);

/// Fraction of frames with IoU >= t for t = 0, 0.05, ..., 1.
Curve success_curve(std::span<const BoundingBox> results, std::span<const BoundingBox> gt);
/// Mean of the success values over the threshold grid.
double success_auc(const Curve& success);

double mean_iou(std::span<const BoundingBox> results, std::span<const BoundingBox> gt);

}  // namespace casiam

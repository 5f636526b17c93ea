#include "casiam/candidates.hpp"

#include <algorithm>
#include <cmath>

#include "casiam/imaging.hpp"

namespace casiam {

double CropGeometry::exemplar_side(const BoundingBox& box) {
  const double p = context_margin(box);
  return std::sqrt((box.w + 2.0 * p) * (box.h + 2.0 * p));
}

Point2 PatchCrop::to_frame(Point2 p) const {
  const Point2 pc = patch_center();
  return {frame_center.x + (p.x - pc.x) * frame_per_patch,
          frame_center.y + (p.y - pc.y) * frame_per_patch};
}

Point2 PatchCrop::to_patch(Point2 f) const {
  const Point2 pc = patch_center();
  return {pc.x + (f.x - frame_center.x) / frame_per_patch,
          pc.y + (f.y - frame_center.y) / frame_per_patch};
}

PatchCrop extract_patch(const Image& frame, std::span<const float> means, Point2 center,
                        double side, int out_side) {
  if (out_side < 1) throw InputError("extract_patch: output side must be >= 1");
  if (!(side > 0.0)) throw InputError("extract_patch: side must be positive");
  PatchCrop crop;
  crop.out_side = out_side;
  crop.frame_center = center;
  crop.frame_per_patch = side / out_side;
  crop.patch = sample_square(frame, means, center, side, out_side);
  return crop;
}

PatchCrop extract_patch(const Image& frame, Point2 center, double side, int out_side) {
  return extract_patch(frame, channel_means(frame), center, side, out_side);
}

Image exemplar_crop(const Image& frame, const BoundingBox& box, int out_side) {
  if (!box.valid()) throw InputError("exemplar_crop: box must have positive size");
  return extract_patch(frame, box.center(), CropGeometry::exemplar_side(box), out_side).patch;
}

PatchCrop candidate_crop(const Image& frame, const BoundingBox& prev_box, int out_side) {
  if (!prev_box.valid()) throw InputError("candidate_crop: box must have positive size");
  return extract_patch(frame, prev_box.center(), CropGeometry::candidate_side(prev_box), out_side);
}

std::vector<double> scale_set(double step, int count) {
  if (count < 1 || count % 2 == 0) throw InputError("scale count must be odd and >= 1");
  if (!(step > 0.0)) throw InputError("scale step must be positive");
  std::vector<double> scales;
  const int half = (count - 1) / 2;
  for (int k = -half; k <= half; ++k) scales.push_back(std::pow(step, k));
  return scales;
}

std::vector<Point2> peak_frame_positions(std::span<const Peak> peaks, const PatchCrop& candidate,
                                         const Image& frame, double crop_side) {
  const double half = 0.5 * crop_side;
  std::vector<Point2> out;
  out.reserve(peaks.size());
  for (const Peak& p : peaks) {
    Point2 f = candidate.to_frame(p.image_pos);
    f.x = std::clamp(f.x, -half, frame.width() - 1 + half);
    f.y = std::clamp(f.y, -half, frame.height() - 1 + half);
    out.push_back(f);
  }
  return out;
}

std::vector<Candidate> make_candidates(const Image& frame, std::span<const Point2> positions,
                                       const BoundingBox& current_box,
                                       std::span<const double> scales, int out_side) {
  if (positions.empty()) throw InputError("make_candidates: no peak positions");
  if (!current_box.valid()) throw InputError("make_candidates: box must have positive size");
  const double base_side = CropGeometry::exemplar_side(current_box);
  const int n_scales = static_cast<int>(scales.size());
  const int total = static_cast<int>(positions.size()) * n_scales;
  std::vector<Candidate> out(total);
  const std::vector<float> means = channel_means(frame);

#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < total; ++idx) {
    const int pi = idx / n_scales;
    const double scale = scales[idx % n_scales];
    Candidate& c = out[idx];
    c.geometry = extract_patch(frame, means, positions[pi], base_side * scale, out_side);
    c.patch = std::move(c.geometry.patch);
    c.geometry.patch = Image();
    c.scale_factor = scale;
    c.image_pos = positions[pi];
    c.source_peak = pi;
    c.proposed_box = {positions[pi].x, positions[pi].y, current_box.w * scale,
                      current_box.h * scale};
  }
  return out;
}

std::vector<Candidate> make_candidates(const Image& frame, std::span<const Peak> peaks,
                                       const PatchCrop& candidate, const BoundingBox& current_box,
                                       std::span<const double> scales, int out_side) {
  if (peaks.empty()) throw InputError("make_candidates: no peaks");
  const double widest = CropGeometry::exemplar_side(current_box) *
                        (scales.empty() ? 1.0 : *std::max_element(scales.begin(), scales.end()));
  const auto positions = peak_frame_positions(peaks, candidate, frame, widest);
  return make_candidates(frame, positions, current_box, scales, out_side);
}

}  // namespace casiam

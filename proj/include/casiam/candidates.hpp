#pragma once

#include <span>
#include <vector>

#include "casiam/matching.hpp"
#include "casiam/types.hpp"

namespace casiam {

/// Context-padded crop geometry around a target box:
///   p = (w + h) / 4,  s = sqrt((w + 2p)(h + 2p)),  candidate side = 2s.
/// The candidate region covers roughly four times the target area.
struct CropGeometry {
  static double context_margin(const BoundingBox& box) { return 0.25 * (box.w + box.h); }
  static double exemplar_side(const BoundingBox& box);
  static double candidate_side(const BoundingBox& box) { return 2.0 * exemplar_side(box); }
};

/// A square frame region resampled to out_side x out_side, with the mapping
/// between patch pixels and frame pixels.
struct PatchCrop {
  Image patch;
  int out_side = 1;
  Point2 frame_center;           // frame-space center of the extracted window
  double frame_per_patch = 1.0;  // frame pixels per patch pixel (crop side / out side)

  Point2 patch_center() const { return {0.5 * (out_side - 1), 0.5 * (out_side - 1)}; }
  Point2 to_frame(Point2 p) const;
  Point2 to_patch(Point2 f) const;
};

/// Resamples the square of side `side` around `center` to out_side x out_side,
/// mean padded. The side is not rounded, so scale factors stay exact.
PatchCrop extract_patch(const Image& frame, Point2 center, double side, int out_side);
/// Same, with the frame's per-channel means supplied by the caller.
PatchCrop extract_patch(const Image& frame, std::span<const float> means, Point2 center,
                        double side, int out_side);

/// Exemplar image x: side-s crop around the box center, resized to out_side (127).
Image exemplar_crop(const Image& frame, const BoundingBox& box, int out_side = 127);

/// Candidate image z: side-2s crop around the previous center, resized to out_side (255).
PatchCrop candidate_crop(const Image& frame, const BoundingBox& prev_box, int out_side = 255);

/// Scale factors step^k for k = -(count-1)/2 .. (count-1)/2, ascending.
std::vector<double> scale_set(double step, int count);

struct Candidate {
  Image patch;             // out_side x out_side (107)
  double scale_factor = 1.0;
  Point2 image_pos;        // frame pixels
  int source_peak = 0;
  BoundingBox proposed_box;
  PatchCrop geometry;      // patch left empty; geometry only
};

/// Frame positions of peaks, mapped through the candidate crop and clamped so
/// that a crop of side `crop_side` around them still overlaps the frame.
std::vector<Point2> peak_frame_positions(std::span<const Peak> peaks, const PatchCrop& candidate,
                                         const Image& frame, double crop_side);

/// One candidate per (position, scale), ordered position-major then scale
/// ascending. Each crop has side exemplar_side(current_box) * scale.
std::vector<Candidate> make_candidates(const Image& frame, std::span<const Point2> positions,
                                       const BoundingBox& current_box,
                                       std::span<const double> scales, int out_side = 107);

/// Convenience form: maps peaks through the candidate crop (with clamping) first.
std::vector<Candidate> make_candidates(const Image& frame, std::span<const Peak> peaks,
                                       const PatchCrop& candidate, const BoundingBox& current_box,
                                       std::span<const double> scales, int out_side = 107);

}  // namespace casiam

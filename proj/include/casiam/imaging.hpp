#pragma once

#include <span>
#include <vector>

#include "casiam/types.hpp"

namespace casiam {

/// Valid-mode cross-correlation summed over channels, plus an additive bias.
/// Output is (Hc - He + 1) x (Wc - We + 1). Throws InputError on a channel
/// mismatch or when the exemplar is larger than the candidate.
ScoreGrid xcorr_valid(const Tensor3& candidate, const Tensor3& exemplar, float bias);

/// Top-left pixel of an integer side x side window whose center is as close
/// as possible to `center` (ties round up).
struct CropWindow {
  int x0 = 0;
  int y0 = 0;
  int side = 1;

  /// The exact frame-space center of the window actually extracted.
  Point2 center() const {
    return {x0 + 0.5 * (side - 1), y0 + 0.5 * (side - 1)};
  }
};
CropWindow crop_window(Point2 center, int side);

/// Square crop centered at `center`. Pixels outside the source are filled with
/// the source's per-channel mean.
Image crop_padded(const Image& image, Point2 center, int side);

/// Resamples the square of (possibly fractional) side `side` centered at
/// `center` onto an out_side x out_side grid. Output pixel i looks at frame
/// coordinate center + (i - (out_side - 1) / 2) * side / out_side, bilinearly
/// interpolated, with everything outside the source reading as `fill` (one
/// value per channel).
Image sample_square(const Image& image, std::span<const float> fill, Point2 center, double side,
                    int out_side);

/// Bilinear resize with corner-aligned sampling. Same-size calls return an
/// exact copy.
Image resize_bilinear(const Image& image, int out_h, int out_w);

std::vector<float> channel_means(const Image& image);
/// ITU-R BT.601 luma; grayscale input is returned unchanged.
Image to_grayscale(const Image& image);
/// Grayscale is replicated into three channels; RGB is returned unchanged.
Image to_rgb(const Image& image);

}  // namespace casiam

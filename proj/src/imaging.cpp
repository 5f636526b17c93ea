#include "casiam/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casiam/kernels.hpp"

namespace casiam {

ScoreGrid xcorr_valid(const Tensor3& candidate, const Tensor3& exemplar, float bias) {
  if (candidate.empty() || exemplar.empty()) {
    throw InputError("xcorr_valid: empty tensor");
  }
  if (candidate.channels() != exemplar.channels()) {
    throw InputError("xcorr_valid: channel mismatch (" + std::to_string(candidate.channels()) +
                     " vs " + std::to_string(exemplar.channels()) + ")");
  }
  if (exemplar.height() > candidate.height() || exemplar.width() > candidate.width()) {
    throw InputError("xcorr_valid: exemplar larger than candidate");
  }
  return kernels::parallel::xcorr_valid(candidate, exemplar, bias);
}

CropWindow crop_window(Point2 center, int side) {
  const double half = 0.5 * (side - 1);
  return {static_cast<int>(std::floor(center.x - half + 0.5)),
          static_cast<int>(std::floor(center.y - half + 0.5)), side};
}

std::vector<float> channel_means(const Image& image) {
  std::vector<float> means(image.channels(), 0.0f);
  for (int c = 0; c < image.channels(); ++c) {
    double sum = 0.0;
    for (float v : image.plane(c)) sum += v;
    means[c] = static_cast<float>(sum / (static_cast<double>(image.height()) * image.width()));
  }
  return means;
}

Image crop_padded(const Image& image, Point2 center, int side) {
  if (side < 1) throw InputError("crop_padded: side must be >= 1");
  const CropWindow win = crop_window(center, side);
  const std::vector<float> means = channel_means(image);
  Image out(side, side, image.channels());

  const int ys = std::max(0, win.y0);
  const int ye = std::min(image.height(), win.y0 + side);
  const int xs = std::max(0, win.x0);
  const int xe = std::min(image.width(), win.x0 + side);

  for (int c = 0; c < image.channels(); ++c) {
    auto dst = out.plane(c);
    std::fill(dst.begin(), dst.end(), means[c]);
    if (ys >= ye || xs >= xe) continue;
    for (int y = ys; y < ye; ++y) {
      const float* src = &image.at(y, xs, c);
      std::copy(src, src + (xe - xs), &out.at(y - win.y0, xs - win.x0, c));
    }
  }
  return out;
}

Image sample_square(const Image& image, std::span<const float> fill, Point2 center, double side,
                    int out_side) {
  if (out_side < 1) throw InputError("sample_square: output side must be >= 1");
  if (!(side > 0.0)) throw InputError("sample_square: side must be positive");
  if (fill.size() != static_cast<std::size_t>(image.channels())) {
    throw InputError("sample_square: need one fill value per channel");
  }
  const double step = side / out_side;
  const double mid = 0.5 * (out_side - 1);

  struct Tap {
    int i0, i1;
    bool in0, in1;
    double w;
  };
  auto taps = [&](double c, int limit) {
    std::vector<Tap> t(out_side);
    for (int i = 0; i < out_side; ++i) {
      const double u = c + (i - mid) * step;
      const double f = std::floor(u);
      const int i0 = static_cast<int>(f);
      t[i] = {i0, i0 + 1, i0 >= 0 && i0 < limit, i0 + 1 >= 0 && i0 + 1 < limit, u - f};
    }
    return t;
  };
  const auto tx = taps(center.x, image.width());
  const auto ty = taps(center.y, image.height());

  Image out(out_side, out_side, image.channels());
  for (int c = 0; c < image.channels(); ++c) {
    const double bg = fill[c];
    auto px = [&](const Tap& r, bool second_row, const Tap& k, bool second_col) -> double {
      const bool in_r = second_row ? r.in1 : r.in0;
      const bool in_k = second_col ? k.in1 : k.in0;
      if (!in_r || !in_k) return bg;
      return image.at(second_row ? r.i1 : r.i0, second_col ? k.i1 : k.i0, c);
    };
    for (int y = 0; y < out_side; ++y) {
      const Tap& r = ty[y];
      for (int x = 0; x < out_side; ++x) {
        const Tap& k = tx[x];
        const double top = px(r, false, k, false) * (1.0 - k.w) + px(r, false, k, true) * k.w;
        const double bot = px(r, true, k, false) * (1.0 - k.w) + px(r, true, k, true) * k.w;
        out.at(y, x, c) = static_cast<float>(top * (1.0 - r.w) + bot * r.w);
      }
    }
  }
  return out;
}

Image resize_bilinear(const Image& image, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw InputError("resize_bilinear: output dimensions must be >= 1");
  if (out_h == image.height() && out_w == image.width()) return image;
  Image out(out_h, out_w, image.channels());
  for (int c = 0; c < image.channels(); ++c) {
    kernels::parallel::resize_bilinear_plane(image.plane(c), image.height(), image.width(),
                                             out.plane(c), out_h, out_w);
  }
  return out;
}

Image to_grayscale(const Image& image) {
  if (image.channels() == 1) return image;
  Image out(image.height(), image.width(), 1);
  auto r = image.plane(0), g = image.plane(1), b = image.plane(2);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  }
  return out;
}

Image to_rgb(const Image& image) {
  if (image.channels() == 3) return image;
  Image out(image.height(), image.width(), 3);
  for (int c = 0; c < 3; ++c) std::ranges::copy(image.plane(0), out.plane(c).begin());
  return out;
}

}  // namespace casiam

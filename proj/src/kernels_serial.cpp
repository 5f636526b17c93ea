#include <algorithm>
#include <cmath>
#include <limits>

#include "casiam/kernels.hpp"

namespace casiam::kernels {

namespace serial {

ScoreGrid xcorr_valid(const Tensor3& candidate, const Tensor3& exemplar, float bias) {
  const int oh = candidate.height() - exemplar.height() + 1;
  const int ow = candidate.width() - exemplar.width() + 1;
  ScoreGrid out(oh, ow);
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      float s = 0.0f;
      for (int c = 0; c < exemplar.channels(); ++c)
        for (int u = 0; u < exemplar.height(); ++u)
          for (int v = 0; v < exemplar.width(); ++v)
            s += exemplar.at(c, u, v) * candidate.at(c, i + u, j + v);
      out.at(i, j) = s + bias;
    }
  }
  return out;
}

Tensor3 conv2d(const Tensor3& input, const ConvWeights& conv) {
  const int oh = conv.output_side(input.height());
  const int ow = conv.output_side(input.width());
  Tensor3 out(conv.out_channels, oh, ow);
  for (int o = 0; o < conv.out_channels; ++o) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        float s = 0.0f;
        for (int i = 0; i < conv.in_channels; ++i)
          for (int ky = 0; ky < conv.kernel; ++ky)
            for (int kx = 0; kx < conv.kernel; ++kx)
              s += conv.w(o, i, ky, kx) * input.at(i, y * conv.stride + ky, x * conv.stride + kx);
        out.at(o, y, x) = s + conv.bias[o];
      }
    }
  }
  return out;
}

void resize_bilinear_plane(std::span<const float> src, int in_h, int in_w, std::span<float> dst,
                           int out_h, int out_w) {
  // Corner-aligned: output corners land exactly on input corners.
  const double sy = out_h > 1 ? static_cast<double>(in_h - 1) / (out_h - 1) : 0.0;
  const double sx = out_w > 1 ? static_cast<double>(in_w - 1) / (out_w - 1) : 0.0;
  for (int y = 0; y < out_h; ++y) {
    const double fy = out_h > 1 ? y * sy : 0.5 * (in_h - 1);
    const int y0 = std::min(static_cast<int>(fy), in_h - 1);
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = out_w > 1 ? x * sx : 0.5 * (in_w - 1);
      const int x0 = std::min(static_cast<int>(fx), in_w - 1);
      const int x1 = std::min(x0 + 1, in_w - 1);
      const double wx = fx - x0;
      const double top = src[y0 * in_w + x0] * (1.0 - wx) + src[y0 * in_w + x1] * wx;
      const double bot = src[y1 * in_w + x0] * (1.0 - wx) + src[y1 * in_w + x1] * wx;
      dst[y * out_w + x] = static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
}

template <typename T>
void dense_forward(DenseShape s, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y) {
  for (int n = 0; n < s.batch; ++n) {
    for (int o = 0; o < s.out; ++o) {
      T acc = b[o];
      for (int i = 0; i < s.in; ++i) acc += x[n * s.in + i] * w[i * s.out + o];
      y[n * s.out + o] = acc;
    }
  }
}

template <typename T>
void dense_backward_params(DenseShape s, std::span<const T> x, std::span<const T> dy,
                           std::span<T> dw, std::span<T> db) {
  for (int i = 0; i < s.in; ++i) {
    for (int o = 0; o < s.out; ++o) {
      T acc = 0;
      for (int n = 0; n < s.batch; ++n) acc += x[n * s.in + i] * dy[n * s.out + o];
      dw[i * s.out + o] = acc;
    }
  }
  for (int o = 0; o < s.out; ++o) {
    T acc = 0;
    for (int n = 0; n < s.batch; ++n) acc += dy[n * s.out + o];
    db[o] = acc;
  }
}

template <typename T>
void dense_backward_input(DenseShape s, std::span<const T> dy, std::span<const T> w,
                          std::span<T> dx) {
  for (int n = 0; n < s.batch; ++n) {
    for (int i = 0; i < s.in; ++i) {
      T acc = 0;
      for (int o = 0; o < s.out; ++o) acc += dy[n * s.out + o] * w[i * s.out + o];
      dx[n * s.in + i] = acc;
    }
  }
}

template void dense_forward<float>(DenseShape, std::span<const float>, std::span<const float>,
                                   std::span<const float>, std::span<float>);
template void dense_forward<double>(DenseShape, std::span<const double>, std::span<const double>,
                                    std::span<const double>, std::span<double>);
template void dense_backward_params<float>(DenseShape, std::span<const float>,
                                           std::span<const float>, std::span<float>,
                                           std::span<float>);
template void dense_backward_params<double>(DenseShape, std::span<const double>,
                                            std::span<const double>, std::span<double>,
                                            std::span<double>);
template void dense_backward_input<float>(DenseShape, std::span<const float>,
                                          std::span<const float>, std::span<float>);
template void dense_backward_input<double>(DenseShape, std::span<const double>,
                                           std::span<const double>, std::span<double>);

}  // namespace serial

void relu_inplace(std::span<float> v) {
  for (float& x : v) x = x > 0.0f ? x : 0.0f;
}

Tensor3 maxpool2d(const Tensor3& input, int kernel, int stride) {
  const int oh = (input.height() - kernel) / stride + 1;
  const int ow = (input.width() - kernel) / stride + 1;
  Tensor3 out(input.channels(), oh, ow);
  for (int c = 0; c < input.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        float m = -std::numeric_limits<float>::infinity();
        for (int ky = 0; ky < kernel; ++ky)
          for (int kx = 0; kx < kernel; ++kx)
            m = std::max(m, input.at(c, y * stride + ky, x * stride + kx));
        out.at(c, y, x) = m;
      }
    }
  }
  return out;
}

}  // namespace casiam::kernels

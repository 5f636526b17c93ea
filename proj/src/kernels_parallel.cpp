#include <algorithm>
#include <vector>

#include "casiam/kernels.hpp"

namespace casiam::kernels::parallel {

ScoreGrid xcorr_valid(const Tensor3& candidate, const Tensor3& exemplar, float bias) {
  const int oh = candidate.height() - exemplar.height() + 1;
  const int ow = candidate.width() - exemplar.width() + 1;
  const int eh = exemplar.height();
  const int ew = exemplar.width();
  const int cw = candidate.width();
  ScoreGrid out(oh, ow);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < oh; ++i) {
    float* row = &out.values[static_cast<std::size_t>(i) * ow];
    for (int c = 0; c < exemplar.channels(); ++c) {
      const float* ex = exemplar.plane(c).data();
      const float* cand = candidate.plane(c).data();
      for (int u = 0; u < eh; ++u) {
        const float* cand_row = cand + static_cast<std::size_t>(i + u) * cw;
        for (int v = 0; v < ew; ++v) {
          const float a = ex[u * ew + v];
          const float* src = cand_row + v;
#pragma omp simd
          for (int j = 0; j < ow; ++j) row[j] += a * src[j];
        }
      }
    }
    for (int j = 0; j < ow; ++j) row[j] += bias;
  }
  return out;
}

Tensor3 conv2d(const Tensor3& input, const ConvWeights& conv) {
  const int oh = conv.output_side(input.height());
  const int ow = conv.output_side(input.width());
  const int iw = input.width();
  const int k = conv.kernel;
  const int st = conv.stride;
  const int oc = conv.out_channels;
  const int taps = conv.in_channels * k * k;
  Tensor3 out(oc, oh, ow);

  // Weights regrouped as [tap][o] so the innermost loop runs over output
  // channels; each output still sums its taps in (i, ky, kx) order.
  std::vector<float> wt(static_cast<std::size_t>(taps) * oc);
  for (int o = 0; o < oc; ++o) {
    for (int t = 0; t < taps; ++t) {
      wt[static_cast<std::size_t>(t) * oc + o] = conv.weights[static_cast<std::size_t>(o) * taps + t];
    }
  }

#pragma omp parallel
  {
    std::vector<float> acc(static_cast<std::size_t>(ow) * oc);
#pragma omp for schedule(static)
    for (int y = 0; y < oh; ++y) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      int t = 0;
      for (int i = 0; i < conv.in_channels; ++i) {
        const float* in = input.plane(i).data();
        for (int ky = 0; ky < k; ++ky) {
          const float* in_row = in + static_cast<std::size_t>(y * st + ky) * iw;
          for (int kx = 0; kx < k; ++kx, ++t) {
            const float* w = &wt[static_cast<std::size_t>(t) * oc];
            const float* src = in_row + kx;
            for (int x = 0; x < ow; ++x) {
              const float v = src[x * st];
              float* a = &acc[static_cast<std::size_t>(x) * oc];
#pragma omp simd
              for (int o = 0; o < oc; ++o) a[o] += w[o] * v;
            }
          }
        }
      }
      for (int o = 0; o < oc; ++o) {
        float* row = &out.at(o, y, 0);
        const float b = conv.bias[o];
        for (int x = 0; x < ow; ++x) row[x] = acc[static_cast<std::size_t>(x) * oc + o] + b;
      }
    }
  }
  return out;
}

void resize_bilinear_plane(std::span<const float> src, int in_h, int in_w, std::span<float> dst,
                           int out_h, int out_w) {
  const double sy = out_h > 1 ? static_cast<double>(in_h - 1) / (out_h - 1) : 0.0;
  const double sx = out_w > 1 ? static_cast<double>(in_w - 1) / (out_w - 1) : 0.0;

  // Column taps are shared by every row.
  std::vector<int> x0s(out_w), x1s(out_w);
  std::vector<double> wxs(out_w);
  for (int x = 0; x < out_w; ++x) {
    const double fx = out_w > 1 ? x * sx : 0.5 * (in_w - 1);
    x0s[x] = std::min(static_cast<int>(fx), in_w - 1);
    x1s[x] = std::min(x0s[x] + 1, in_w - 1);
    wxs[x] = fx - x0s[x];
  }

#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_h; ++y) {
    const double fy = out_h > 1 ? y * sy : 0.5 * (in_h - 1);
    const int y0 = std::min(static_cast<int>(fy), in_h - 1);
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double wy = fy - y0;
    const float* r0 = src.data() + static_cast<std::size_t>(y0) * in_w;
    const float* r1 = src.data() + static_cast<std::size_t>(y1) * in_w;
    float* out = dst.data() + static_cast<std::size_t>(y) * out_w;
    for (int x = 0; x < out_w; ++x) {
      const double wx = wxs[x];
      const double top = r0[x0s[x]] * (1.0 - wx) + r0[x1s[x]] * wx;
      const double bot = r1[x0s[x]] * (1.0 - wx) + r1[x1s[x]] * wx;
      out[x] = static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
}

template <typename T>
void dense_forward(DenseShape s, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y) {
#pragma omp parallel for schedule(static)
  for (int n = 0; n < s.batch; ++n) {
    T* yr = y.data() + static_cast<std::size_t>(n) * s.out;
    std::copy(b.begin(), b.begin() + s.out, yr);
    const T* xr = x.data() + static_cast<std::size_t>(n) * s.in;
    for (int i = 0; i < s.in; ++i) {
      const T a = xr[i];
      if (a == T(0)) continue;  // post-ReLU inputs are mostly zero
      const T* wr = w.data() + static_cast<std::size_t>(i) * s.out;
#pragma omp simd
      for (int o = 0; o < s.out; ++o) yr[o] += a * wr[o];
    }
  }
}

template <typename T>
void dense_backward_params(DenseShape s, std::span<const T> x, std::span<const T> dy,
                           std::span<T> dw, std::span<T> db) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.in; ++i) {
    T* dwr = dw.data() + static_cast<std::size_t>(i) * s.out;
    std::fill(dwr, dwr + s.out, T(0));
    for (int n = 0; n < s.batch; ++n) {
      const T a = x[static_cast<std::size_t>(n) * s.in + i];
      if (a == T(0)) continue;
      const T* g = dy.data() + static_cast<std::size_t>(n) * s.out;
#pragma omp simd
      for (int o = 0; o < s.out; ++o) dwr[o] += a * g[o];
    }
  }
  std::fill(db.begin(), db.begin() + s.out, T(0));
  for (int n = 0; n < s.batch; ++n) {
    const T* g = dy.data() + static_cast<std::size_t>(n) * s.out;
    for (int o = 0; o < s.out; ++o) db[o] += g[o];
  }
}

template <typename T>
void dense_backward_input(DenseShape s, std::span<const T> dy, std::span<const T> w,
                          std::span<T> dx) {
  // Transpose once so the inner loop runs over contiguous input columns.
  std::vector<T> wt(static_cast<std::size_t>(s.in) * s.out);
  for (int i = 0; i < s.in; ++i)
    for (int o = 0; o < s.out; ++o) wt[static_cast<std::size_t>(o) * s.in + i] = w[i * s.out + o];

#pragma omp parallel for schedule(static)
  for (int n = 0; n < s.batch; ++n) {
    T* dxr = dx.data() + static_cast<std::size_t>(n) * s.in;
    std::fill(dxr, dxr + s.in, T(0));
    const T* g = dy.data() + static_cast<std::size_t>(n) * s.out;
    for (int o = 0; o < s.out; ++o) {
      const T a = g[o];
      if (a == T(0)) continue;
      const T* wr = wt.data() + static_cast<std::size_t>(o) * s.in;
#pragma omp simd
      for (int i = 0; i < s.in; ++i) dxr[i] += a * wr[i];
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

}  // namespace casiam::kernels::parallel

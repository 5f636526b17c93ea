#pragma once

// Data-parallel numeric kernels. Every kernel exists twice with the same
// signature: `serial` is the plain reference kept for testing and benchmarks,
// `parallel` distributes independent outputs over OpenMP threads. Each output
// element is accumulated in the same order in both versions, so results agree
// bit-for-bit regardless of thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "casiam/types.hpp"

namespace casiam::kernels {

/// Weights of a square-kernel 2-D convolution, laid out [out][in][ky][kx].
struct ConvWeights {
  int out_channels = 0;
  int in_channels = 0;
  int kernel = 0;
  int stride = 1;
  std::vector<float> weights;
  std::vector<float> bias;

  /// Output side for an input side, floor((n - k) / stride) + 1.
  int output_side(int input_side) const { return (input_side - kernel) / stride + 1; }
  float w(int o, int i, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel + ky) * kernel + kx];
  }
};

/// Shapes for a batched dense layer: X is [batch][in], W is [in][out], Y is [batch][out].
struct DenseShape {
  int batch = 0;
  int in = 0;
  int out = 0;
};

namespace serial {

ScoreGrid xcorr_valid(const Tensor3& candidate, const Tensor3& exemplar, float bias);
Tensor3 conv2d(const Tensor3& input, const ConvWeights& conv);
void resize_bilinear_plane(std::span<const float> src, int in_h, int in_w, std::span<float> dst,
                           int out_h, int out_w);

template <typename T>
void dense_forward(DenseShape s, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y);
/// dW[i][o] = sum_n x[n][i] * dy[n][o]; db[o] = sum_n dy[n][o]. Overwrites dw and db.
template <typename T>
void dense_backward_params(DenseShape s, std::span<const T> x, std::span<const T> dy,
                           std::span<T> dw, std::span<T> db);
/// dX[n][i] = sum_o dy[n][o] * w[i][o]. Overwrites dx.
template <typename T>
void dense_backward_input(DenseShape s, std::span<const T> dy, std::span<const T> w,
                          std::span<T> dx);

}  // namespace serial

namespace parallel {

ScoreGrid xcorr_valid(const Tensor3& candidate, const Tensor3& exemplar, float bias);
Tensor3 conv2d(const Tensor3& input, const ConvWeights& conv);
void resize_bilinear_plane(std::span<const float> src, int in_h, int in_w, std::span<float> dst,
                           int out_h, int out_w);

template <typename T>
void dense_forward(DenseShape s, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y);
template <typename T>
void dense_backward_params(DenseShape s, std::span<const T> x, std::span<const T> dy,
                           std::span<T> dw, std::span<T> db);
template <typename T>
void dense_backward_input(DenseShape s, std::span<const T> dy, std::span<const T> w,
                          std::span<T> dx);

}  // namespace parallel

// Shape-only helpers shared by both variants.
void relu_inplace(std::span<float> v);
Tensor3 maxpool2d(const Tensor3& input, int kernel, int stride);

}  // namespace casiam::kernels

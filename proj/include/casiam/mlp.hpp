#pragma once

// Trainable tail of the classification subnetwork: fc1 -> ReLU -> fc2 -> ReLU
// -> fc_cls, softmax cross-entropy. Templated on the scalar so the same
// backprop code runs in float for tracking and in double for gradient checks.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "casiam/kernels.hpp"
#include "casiam/types.hpp"

namespace casiam {

/// Class indices of the two-way softmax.
inline constexpr int kTargetClass = 0;
inline constexpr int kBackgroundClass = 1;

template <typename T>
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<T> w;  // [in][out]
  std::vector<T> b;  // [out]

  DenseLayer() = default;
  DenseLayer(int in_, int out_)
      : in(in_), out(out_), w(static_cast<std::size_t>(in_) * out_, T(0)), b(out_, T(0)) {}

  bool operator==(const DenseLayer&) const = default;
};

template <typename T>
struct TailParams {
  std::array<DenseLayer<T>, 3> layers;  // fc1, fc2, fc_cls

  /// Every parameter buffer, weights before biases, layer order.
  std::array<std::span<T>, 6> buffers() {
    return {layers[0].w, layers[0].b, layers[1].w, layers[1].b, layers[2].w, layers[2].b};
  }
  std::array<std::span<const T>, 6> buffers() const {
    return {layers[0].w, layers[0].b, layers[1].w, layers[1].b, layers[2].w, layers[2].b};
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : buffers()) n += b.size();
    return n;
  }
  bool operator==(const TailParams&) const = default;
};

template <typename T>
class MlpTail {
 public:
  MlpTail() = default;

  MlpTail(int in, int hidden, std::uint64_t seed) {
    params_.layers = {DenseLayer<T>(in, hidden), DenseLayer<T>(hidden, hidden),
                      DenseLayer<T>(hidden, 2)};
    std::mt19937_64 rng(seed);
    for (int l = 0; l < 2; ++l) {
      auto& layer = params_.layers[l];
      const T bound = static_cast<T>(std::sqrt(6.0 / layer.in));
      std::uniform_real_distribution<T> dist(-bound, bound);
      for (T& v : layer.w) v = dist(rng);
    }
    std::normal_distribution<T> cls(T(0), T(0.01));
    for (T& v : params_.layers[2].w) v = cls(rng);
    velocity_ = zeros_like(params_);
  }

  int in_features() const { return params_.layers[0].in; }
  int hidden() const { return params_.layers[0].out; }
  TailParams<T>& params() { return params_; }
  const TailParams<T>& params() const { return params_; }
  const TailParams<T>& velocity() const { return velocity_; }

  /// Logits [batch][2] for features [batch][in].
  std::vector<T> logits(std::span<const T> x, int batch) const {
    Activations a = forward(x, batch);
    return std::move(a.z);
  }

  /// Mean cross-entropy over the batch. labels[n] is kTargetClass or kBackgroundClass.
  T loss(std::span<const T> x, std::span<const int> labels) const {
    const int batch = static_cast<int>(labels.size());
    const Activations a = forward(x, batch);
    return mean_cross_entropy(a.z, labels, nullptr);
  }

  /// Mean cross-entropy and its gradient with respect to every parameter.
  T loss_and_grad(std::span<const T> x, std::span<const int> labels, TailParams<T>& grad) const {
    const int batch = static_cast<int>(labels.size());
    const Activations a = forward(x, batch);
    std::vector<T> dz(a.z.size());
    const T loss_value = mean_cross_entropy(a.z, labels, &dz);

    grad = zeros_like(params_);
    const auto& L = params_.layers;
    namespace k = kernels::parallel;

    k::dense_backward_params<T>(shape(2, batch), a.h2, dz, grad.layers[2].w, grad.layers[2].b);
    std::vector<T> dh2(static_cast<std::size_t>(batch) * L[1].out);
    k::dense_backward_input<T>(shape(2, batch), dz, L[2].w, dh2);
    relu_backward(a.h2, dh2);

    k::dense_backward_params<T>(shape(1, batch), a.h1, dh2, grad.layers[1].w, grad.layers[1].b);
    std::vector<T> dh1(static_cast<std::size_t>(batch) * L[0].out);
    k::dense_backward_input<T>(shape(1, batch), dh2, L[1].w, dh1);
    relu_backward(a.h1, dh1);

    k::dense_backward_params<T>(shape(0, batch), x, dh1, grad.layers[0].w, grad.layers[0].b);
    return loss_value;
  }

  /// v <- momentum * v + g;  theta <- theta - lr * v.
  void sgd_step(const TailParams<T>& grad, T lr, T momentum) {
    auto p = params_.buffers();
    auto v = velocity_.buffers();
    auto g = grad.buffers();
    for (std::size_t t = 0; t < p.size(); ++t) {
      for (std::size_t i = 0; i < p[t].size(); ++i) {
        v[t][i] = momentum * v[t][i] + g[t][i];
        p[t][i] -= lr * v[t][i];
      }
    }
  }

 private:
  struct Activations {
    std::vector<T> h1, h2, z;
  };

  kernels::DenseShape shape(int layer, int batch) const {
    return {batch, params_.layers[layer].in, params_.layers[layer].out};
  }

  static TailParams<T> zeros_like(const TailParams<T>& p) {
    TailParams<T> z;
    for (int l = 0; l < 3; ++l) z.layers[l] = DenseLayer<T>(p.layers[l].in, p.layers[l].out);
    return z;
  }

  static void relu(std::vector<T>& v) {
    for (T& x : v) x = x > T(0) ? x : T(0);
  }
  static void relu_backward(const std::vector<T>& act, std::vector<T>& grad) {
    for (std::size_t i = 0; i < act.size(); ++i)
      if (!(act[i] > T(0))) grad[i] = T(0);
  }

  Activations forward(std::span<const T> x, int batch) const {
    if (batch < 1 || x.size() != static_cast<std::size_t>(batch) * in_features()) {
      throw InputError("MlpTail: feature batch does not match the input width");
    }
    const auto& L = params_.layers;
    namespace k = kernels::parallel;
    Activations a;
    a.h1.resize(static_cast<std::size_t>(batch) * L[0].out);
    k::dense_forward<T>(shape(0, batch), x, L[0].w, L[0].b, a.h1);
    relu(a.h1);
    a.h2.resize(static_cast<std::size_t>(batch) * L[1].out);
    k::dense_forward<T>(shape(1, batch), a.h1, L[1].w, L[1].b, a.h2);
    relu(a.h2);
    a.z.resize(static_cast<std::size_t>(batch) * 2);
    k::dense_forward<T>(shape(2, batch), a.h2, L[2].w, L[2].b, a.z);
    return a;
  }

  // Optionally writes dLoss/dz into dz.
  static T mean_cross_entropy(const std::vector<T>& z, std::span<const int> labels,
                              std::vector<T>* dz) {
    const int batch = static_cast<int>(labels.size());
    T total = T(0);
    for (int n = 0; n < batch; ++n) {
      const T z0 = z[2 * n], z1 = z[2 * n + 1];
      const T m = std::max(z0, z1);
      const T lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
      const int y = labels[n];
      total += lse - z[2 * n + y];
      if (dz != nullptr) {
        for (int c = 0; c < 2; ++c) {
          const T p = std::exp(z[2 * n + c] - lse);
          (*dz)[2 * n + c] = (p - (c == y ? T(1) : T(0))) / static_cast<T>(batch);
        }
      }
    }
    return total / static_cast<T>(batch);
  }

  TailParams<T> params_;
  TailParams<T> velocity_;
};

}  // namespace casiam

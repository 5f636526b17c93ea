#include "casiam/embedding.hpp"

#include <cmath>
#include <random>

#include "casiam/imaging.hpp"

namespace casiam {

void Embedding::check_geometry(const Image& patch) const {
  if (patch.empty() || !spec().accepts(patch.height()) || !spec().accepts(patch.width())) {
    throw InputError("embedding '" + spec().name + "' needs patches of side >= " +
                     std::to_string(spec().receptive_field) + ", got " +
                     std::to_string(patch.height()) + "x" + std::to_string(patch.width()));
  }
}

namespace {

struct Moments {
  double mean = 0.0;
  double sum_sq_dev = 0.0;  // sum of (x - mean)^2
};

Moments moments(std::span<const float> v) {
  double s = 0.0;
  double s2 = 0.0;
  for (float x : v) {
    s += x;
    s2 += static_cast<double>(x) * x;
  }
  const double n = static_cast<double>(v.size());
  Moments m;
  m.mean = s / n;
  m.sum_sq_dev = std::max(0.0, s2 - s * s / n);
  return m;
}

}  // namespace

Tensor3 standardize_gray(const Image& patch) {
  const Image gray = to_grayscale(patch);
  const Moments m = moments(gray.plane(0));
  const double std_dev = std::sqrt(m.sum_sq_dev / static_cast<double>(gray.plane(0).size()));
  const double inv = 1.0 / (std_dev + 1e-6);
  Tensor3 out(1, gray.height(), gray.width());
  auto src = gray.plane(0);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>((src[i] - m.mean) * inv);
  }
  return out;
}

kernels::ConvWeights seeded_conv(int in_channels, int out_channels, int kernel, int stride,
                                 std::uint64_t seed) {
  kernels::ConvWeights conv;
  conv.in_channels = in_channels;
  conv.out_channels = out_channels;
  conv.kernel = kernel;
  conv.stride = stride;
  const double fan_in = static_cast<double>(in_channels) * kernel * kernel;
  const float bound = static_cast<float>(std::sqrt(6.0 / fan_in));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-bound, bound);
  conv.weights.resize(static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel);
  for (float& w : conv.weights) w = dist(rng);
  conv.bias.assign(out_channels, 0.0f);
  return conv;
}

IdentityEmbedding::IdentityEmbedding() : spec_{"identity", 1, 1, 1} {}

Tensor3 IdentityEmbedding::embed(const Image& patch) const {
  check_geometry(patch);
  const Image gray = to_grayscale(patch);
  const Moments m = moments(gray.plane(0));
  const double inv = 1.0 / (std::sqrt(m.sum_sq_dev) + 1e-6);
  Tensor3 out(1, gray.height(), gray.width());
  auto src = gray.plane(0);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>((src[i] - m.mean) * inv);
  }
  return out;
}

FixedConvEmbedding::FixedConvEmbedding(std::uint64_t seed)
    : spec_{"fixed_conv", 8, 16, 87},
      conv1_(seeded_conv(1, 8, 15, 4, seed)),
      conv2_(seeded_conv(8, 16, 19, 2, seed ^ 0x9e3779b97f4a7c15ULL)) {}

Tensor3 FixedConvEmbedding::embed(const Image& patch) const {
  check_geometry(patch);
  Tensor3 x = standardize_gray(patch);
  x = kernels::parallel::conv2d(x, conv1_);
  kernels::relu_inplace(x.data());
  x = kernels::parallel::conv2d(x, conv2_);
  kernels::relu_inplace(x.data());
  return x;
}

std::unique_ptr<Embedding> make_embedding(std::string_view name, std::uint64_t seed) {
  if (name == "identity") return std::make_unique<IdentityEmbedding>();
  if (name == "fixed_conv") return std::make_unique<FixedConvEmbedding>(seed);
  throw InputError("unknown embedding '" + std::string(name) + "'");
}

}  // namespace casiam

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "casiam/kernels.hpp"
#include "casiam/types.hpp"

namespace casiam {

/// Geometry of a feature extractor. A patch of side S maps to a feature map of
/// side floor((S - receptive_field) / total_stride) + 1; S < receptive_field is
/// rejected.
struct EmbeddingSpec {
  std::string name;
  int total_stride = 1;
  int out_channels = 1;
  int receptive_field = 1;

  int output_side(int input_side) const {
    return (input_side - receptive_field) / total_stride + 1;
  }
  bool accepts(int input_side) const { return input_side >= receptive_field; }
};

/// Feature extractor phi: image patch -> feature map. Implementations are
/// immutable after construction, so embed() may be called concurrently.
class Embedding {
 public:
  virtual ~Embedding() = default;
  virtual const EmbeddingSpec& spec() const = 0;
  virtual Tensor3 embed(const Image& patch) const = 0;

 protected:
  void check_geometry(const Image& patch) const;
};

/// Stride-1 single-channel features: the grayscale patch, shifted to zero
/// mean and scaled to unit L2 norm.
class IdentityEmbedding final : public Embedding {
 public:
  IdentityEmbedding();
  const EmbeddingSpec& spec() const override { return spec_; }
  Tensor3 embed(const Image& patch) const override;

 private:
  EmbeddingSpec spec_;
};

/// Two fixed-weight conv+ReLU stages over the standardized grayscale patch:
/// 15x15 stride 4 into 8 channels, then 19x19 stride 2 into 16 channels.
/// Total stride 8, receptive field 87, so 127 -> 6 and 255 -> 22.
class FixedConvEmbedding final : public Embedding {
 public:
  explicit FixedConvEmbedding(std::uint64_t seed);
  const EmbeddingSpec& spec() const override { return spec_; }
  Tensor3 embed(const Image& patch) const override;

  const kernels::ConvWeights& conv1() const { return conv1_; }
  const kernels::ConvWeights& conv2() const { return conv2_; }

 private:
  EmbeddingSpec spec_;
  kernels::ConvWeights conv1_;
  kernels::ConvWeights conv2_;
};

/// "identity" or "fixed_conv"; anything else is an InputError.
std::unique_ptr<Embedding> make_embedding(std::string_view name, std::uint64_t seed);

/// Grayscale patch shifted to zero mean and divided by (std + 1e-6). Sums are
/// accumulated in double, so integer-valued inputs give order-independent
/// statistics.
Tensor3 standardize_gray(const Image& patch);

/// Weights drawn uniformly from +-sqrt(6 / fan_in) with zero bias.
kernels::ConvWeights seeded_conv(int in_channels, int out_channels, int kernel, int stride,
                                 std::uint64_t seed);

}  // namespace casiam

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "casiam/candidates.hpp"
#include "casiam/kernels.hpp"
#include "casiam/mlp.hpp"
#include "casiam/types.hpp"

namespace casiam {

struct ClassifierConfig {
  int patch_size = 107;
  int hidden = 512;
  int init_iters = 30;
  int update_iters = 10;
  double lr_init = 1e-3;
  double lr_update = 1e-4;
  double momentum = 0.9;
  int pos_samples = 32;
  int neg_samples = 96;
  double pos_iou = 0.7;
  double neg_iou = 0.3;
  double neg_shift = 1.0;  // background translation range, in mean target sides
  double neg_scale = 2.0;  // background scale range is neg_scale^[-1, 1]
  std::uint64_t seed = 7;
};

/// Frozen convolutional front end: two conv + ReLU + 3x3/2 maxpool stages over
/// the RGB patch scaled to (x - 128) / 64. 107x107 in, 16x5x5 = 400 features out.
class ConvStack {
 public:
  ConvStack() = default;
  ConvStack(int patch_size, std::uint64_t seed);

  int patch_size() const { return patch_size_; }
  int feature_size() const { return feature_size_; }
  std::vector<float> features(const Image& patch) const;

  const kernels::ConvWeights& conv1() const { return conv1_; }
  const kernels::ConvWeights& conv2() const { return conv2_; }

 private:
  int patch_size_ = 0;
  int feature_size_ = 0;
  kernels::ConvWeights conv1_;
  kernels::ConvWeights conv2_;
};

/// The classification subnetwork: frozen conv stack plus a trainable
/// fc1(512) -> fc2(512) -> fc_cls(2) tail with momentum buffers.
class ClassifierHead {
 public:
  ClassifierHead() = default;
  explicit ClassifierHead(const ClassifierConfig& config);

  const ConvStack& conv_stack() const { return conv_; }
  MlpTail<float>& tail() { return tail_; }
  const MlpTail<float>& tail() const { return tail_; }
  int patch_size() const { return conv_.patch_size(); }

 private:
  ConvStack conv_;
  MlpTail<float> tail_;
};

struct ClassScores {
  double p_target = 0.5;
  double p_background = 0.5;
};

/// Softmax probabilities for one patch. Throws InputError unless the patch
/// matches the head's patch size.
ClassScores score(const ClassifierHead& head, const Image& patch);
/// Target-class probabilities for a batch of patches, in order.
std::vector<double> score_target(const ClassifierHead& head, std::span<const Image> patches);

/// Index of the largest value; the earliest index wins ties.
int argmax_first(std::span<const double> values);

struct Selection {
  int index = 0;
  double s_c = 0.0;             // winner's target probability
  std::vector<double> p_target;  // per candidate
};
Selection select_optimal(const ClassifierHead& head, std::span<const Candidate> candidates);

enum class SampleLabel { foreground, background };

struct TrainingSample {
  Image patch;
  SampleLabel label = SampleLabel::foreground;
  double iou_with_target = 0.0;
  BoundingBox box;
};

struct SampleConfig {
  int pos_count = 32;
  int neg_count = 96;
  double pos_iou = 0.7;
  double neg_iou = 0.3;
  double neg_shift = 1.0;
  double neg_scale = 2.0;
  int patch_size = 107;
};
SampleConfig sample_config(const ClassifierConfig& config);

/// Foreground boxes: Gaussian jitter (translation sigma 0.1 x mean side, scale
/// 1.05^(N(0,1)/2)) kept when IoU >= pos_iou. Background boxes: uniform jitter
/// (translation within +-neg_shift mean sides, scale neg_scale^U(-1,1)) kept when
/// IoU <= neg_iou. Every box center must lie inside the frame. Each class gets
/// at most 50 x count draws, so hard geometries return fewer samples.
std::vector<TrainingSample> generate_samples(const Image& frame, const BoundingBox& target,
                                             const SampleConfig& config, std::uint64_t seed);

struct FineTuneReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
};

/// Full-batch SGD with momentum on softmax cross-entropy, touching only the
/// tail layers. Throws InputError when the samples do not contain both classes.
FineTuneReport fine_tune(ClassifierHead& head, std::span<const TrainingSample> samples,
                         int iterations, double lr, double momentum);

}  // namespace casiam

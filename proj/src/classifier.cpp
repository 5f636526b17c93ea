#include "casiam/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "casiam/embedding.hpp"
#include "casiam/imaging.hpp"

namespace casiam {

namespace {

int pooled(int n) { return (n - 3) / 2 + 1; }

}  // namespace

ConvStack::ConvStack(int patch_size, std::uint64_t seed)
    : patch_size_(patch_size),
      conv1_(seeded_conv(3, 8, 7, 2, seed)),
      conv2_(seeded_conv(8, 16, 5, 2, seed ^ 0xc2b2ae3d27d4eb4fULL)) {
  const int side = pooled(conv2_.output_side(pooled(conv1_.output_side(patch_size))));
  if (patch_size < 1 || side < 1) {
    throw InputError("classifier patch size " + std::to_string(patch_size) + " is too small");
  }
  feature_size_ = conv2_.out_channels * side * side;
}

std::vector<float> ConvStack::features(const Image& patch) const {
  if (patch.height() != patch_size_ || patch.width() != patch_size_) {
    throw InputError("classifier expects " + std::to_string(patch_size_) + "x" +
                     std::to_string(patch_size_) + " patches, got " +
                     std::to_string(patch.height()) + "x" + std::to_string(patch.width()));
  }
  const Image rgb = to_rgb(patch);
  Tensor3 x(3, patch_size_, patch_size_);
  std::ranges::transform(rgb.data(), x.data().begin(),
                         [](float v) { return (v - 128.0f) * (1.0f / 64.0f); });
  x = kernels::parallel::conv2d(x, conv1_);
  kernels::relu_inplace(x.data());
  x = kernels::maxpool2d(x, 3, 2);
  x = kernels::parallel::conv2d(x, conv2_);
  kernels::relu_inplace(x.data());
  x = kernels::maxpool2d(x, 3, 2);
  return {x.data().begin(), x.data().end()};
}

ClassifierHead::ClassifierHead(const ClassifierConfig& config)
    : conv_(config.patch_size, config.seed),
      tail_(conv_.feature_size(), config.hidden, config.seed ^ 0x165667b19e3779f9ULL) {
  if (config.hidden < 1) throw InputError("classifier hidden width must be >= 1");
}

namespace {

std::vector<float> batch_features(const ConvStack& conv, std::span<const Image> patches) {
  const int n = static_cast<int>(patches.size());
  const std::size_t f = conv.feature_size();
  std::vector<float> out(n * f);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const auto feat = conv.features(patches[i]);
      std::ranges::copy(feat, out.begin() + i * f);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw InputError(e);
  return out;
}

ClassScores softmax2(float z_target, float z_background) {
  const double d = static_cast<double>(z_background) - z_target;
  ClassScores s;
  // Stable two-way softmax; p_background is derived so the pair sums to 1.
  if (d > 0) {
    const double e = std::exp(-d);
    s.p_target = e / (1.0 + e);
  } else {
    s.p_target = 1.0 / (1.0 + std::exp(d));
  }
  s.p_background = 1.0 - s.p_target;
  return s;
}

}  // namespace

std::vector<double> score_target(const ClassifierHead& head, std::span<const Image> patches) {
  if (patches.empty()) return {};
  const auto feats = batch_features(head.conv_stack(), patches);
  const auto z = head.tail().logits(feats, static_cast<int>(patches.size()));
  std::vector<double> p(patches.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = softmax2(z[2 * i], z[2 * i + 1]).p_target;
  return p;
}

ClassScores score(const ClassifierHead& head, const Image& patch) {
  const auto feat = head.conv_stack().features(patch);
  const auto z = head.tail().logits(feat, 1);
  return softmax2(z[kTargetClass], z[kBackgroundClass]);
}

int argmax_first(std::span<const double> values) {
  if (values.empty()) throw InputError("argmax over an empty list");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Selection select_optimal(const ClassifierHead& head, std::span<const Candidate> candidates) {
  if (candidates.empty()) throw InputError("select_optimal: no candidates");
  std::vector<Image> patches;
  patches.reserve(candidates.size());
  for (const auto& c : candidates) patches.push_back(c.patch);
  Selection sel;
  sel.p_target = score_target(head, patches);
  sel.index = argmax_first(sel.p_target);
  sel.s_c = sel.p_target[sel.index];
  return sel;
}

SampleConfig sample_config(const ClassifierConfig& config) {
  return {config.pos_samples, config.neg_samples, config.pos_iou, config.neg_iou,
          config.neg_shift, config.neg_scale, config.patch_size};
}

std::vector<TrainingSample> generate_samples(const Image& frame, const BoundingBox& target,
                                             const SampleConfig& config, std::uint64_t seed) {
  if (!target.valid()) throw InputError("generate_samples: target box must have positive size");
  std::mt19937_64 rng(seed);
  const double side = 0.5 * (target.w + target.h);
  auto inside = [&](const BoundingBox& b) {
    return b.cx >= 0.0 && b.cy >= 0.0 && b.cx <= frame.width() - 1 && b.cy <= frame.height() - 1;
  };

  std::vector<BoundingBox> boxes;
  std::vector<SampleLabel> labels;
  std::vector<double> ious;

  std::normal_distribution<double> gauss(0.0, 1.0);
  int kept = 0;
  for (int attempt = 0; kept < config.pos_count && attempt < 50 * config.pos_count; ++attempt) {
    const double s = std::pow(1.05, 0.5 * gauss(rng));
    BoundingBox b{target.cx + 0.1 * side * gauss(rng), target.cy + 0.1 * side * gauss(rng),
                  target.w * s, target.h * s};
    const double o = iou(b, target);
    if (o >= config.pos_iou && inside(b)) {
      boxes.push_back(b);
      labels.push_back(SampleLabel::foreground);
      ious.push_back(o);
      ++kept;
    }
  }

  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  kept = 0;
  for (int attempt = 0; kept < config.neg_count && attempt < 50 * config.neg_count; ++attempt) {
    const double s = std::pow(config.neg_scale, uni(rng));
    BoundingBox b{target.cx + config.neg_shift * side * uni(rng),
                  target.cy + config.neg_shift * side * uni(rng),
                  target.w * s, target.h * s};
    const double o = iou(b, target);
    if (o <= config.neg_iou && inside(b)) {
      boxes.push_back(b);
      labels.push_back(SampleLabel::background);
      ious.push_back(o);
      ++kept;
    }
  }

  const std::vector<float> means = channel_means(frame);
  std::vector<TrainingSample> samples(boxes.size());
  const int n = static_cast<int>(boxes.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    samples[i].patch = extract_patch(frame, means, boxes[i].center(),
                                     CropGeometry::exemplar_side(boxes[i]), config.patch_size)
                           .patch;
    samples[i].label = labels[i];
    samples[i].iou_with_target = ious[i];
    samples[i].box = boxes[i];
  }
  return samples;
}

FineTuneReport fine_tune(ClassifierHead& head, std::span<const TrainingSample> samples,
                         int iterations, double lr, double momentum) {
  const bool has_fg = std::ranges::any_of(
      samples, [](const auto& s) { return s.label == SampleLabel::foreground; });
  const bool has_bg = std::ranges::any_of(
      samples, [](const auto& s) { return s.label == SampleLabel::background; });
  if (!has_fg || !has_bg) {
    throw InputError("fine_tune needs at least one foreground and one background sample");
  }
  if (iterations < 0) throw InputError("fine_tune: iterations must be >= 0");

  std::vector<Image> patches;
  std::vector<int> labels;
  for (const auto& s : samples) {
    patches.push_back(s.patch);
    labels.push_back(s.label == SampleLabel::foreground ? kTargetClass : kBackgroundClass);
  }
  const auto feats = batch_features(head.conv_stack(), patches);

  auto& tail = head.tail();
  FineTuneReport report;
  report.iterations = iterations;
  TailParams<float> grad;
  for (int it = 0; it < iterations; ++it) {
    const float loss = tail.loss_and_grad(feats, labels, grad);
    if (it == 0) report.initial_loss = loss;
    tail.sgd_step(grad, static_cast<float>(lr), static_cast<float>(momentum));
  }
  report.final_loss = tail.loss(feats, labels);
  if (iterations == 0) report.initial_loss = report.final_loss;
  return report;
}

}  // namespace casiam

#include "casiam/tracker.hpp"

#include <algorithm>

#include "casiam/imaging.hpp"

namespace casiam {

namespace {

ScoreHistory empty_history(const Hyperparams& config) {
  return ScoreHistory(static_cast<std::size_t>(config.history_n));
}

}  // namespace

CascadeTracker::CascadeTracker(const Image& first_frame, const BoundingBox& first_box,
                               Hyperparams config) {
  config.validate();
  if (!first_box.valid()) throw InputError("initial box must have positive width and height");
  if (first_frame.empty()) throw InputError("initial frame is empty");

  embedding_ = make_embedding(config.embedding_name, config.embedding_seed);
  if (!embedding_->spec().accepts(config.candidate_size)) {
    throw InputError("size.candidate is smaller than the embedding's receptive field");
  }
  scales_ = scale_set(config.scale_step, config.scale_count);

  state_.current_box = first_box;
  state_.exemplar_feat =
      embedding_->embed(exemplar_crop(first_frame, first_box, config.exemplar_size));
  state_.head = ClassifierHead(config.classifier);
  state_.history = empty_history(config);
  state_.frame_index = 1;
  state_.config = std::move(config);

  const auto& cc = state_.config.classifier;
  if (state_.config.variant != Variant::matching_only) {
    const auto samples =
        generate_samples(first_frame, first_box, sample_config(cc), frame_seed());
    fine_tune(state_.head, samples, cc.init_iters, cc.lr_init, cc.momentum);
  }
}

std::uint64_t CascadeTracker::frame_seed() const {
  return state_.config.classifier.seed ^
         (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(state_.frame_index));
}

TrackResult CascadeTracker::track_frame(const Image& frame) {
  if (frame.empty()) throw InputError("frame is empty");
  const Hyperparams& cfg = state_.config;
  const BoundingBox prev = state_.current_box;

  const PatchCrop crop = candidate_crop(frame, prev, cfg.candidate_size);
  const Tensor3 feat = embedding_->embed(crop.patch);
  const SimilarityMap map = similarity(state_.exemplar_feat, feat, cfg.matching_bias,
                                       embedding_->spec().total_stride, cfg.candidate_size);
  const std::vector<Peak> peaks = find_peaks(map, cfg.gammas.gamma_p);

  TrackResult result;
  result.peak_count = static_cast<int>(peaks.size());
  ++state_.frame_index;

  if (cfg.variant == Variant::matching_only) {
    const Peak& best = peaks.front();
    const auto pos = peak_frame_positions(std::span(&best, 1), crop, frame,
                                          CropGeometry::exemplar_side(prev));
    result.box = {pos[0].x, pos[0].y, prev.w, prev.h};
    result.s_m = best.norm_score;
    result.s_c = 0.0;
    state_.current_box = result.box;
    state_.history.record(result.s_m, result.s_c);
    return result;
  }

  const double widest = CropGeometry::exemplar_side(prev) * scales_.back();
  const auto positions = peak_frame_positions(peaks, crop, frame, widest);
  const auto candidates =
      make_candidates(frame, positions, prev, scales_, cfg.classifier.patch_size);
  const Selection sel = select_optimal(state_.head, candidates);
  const Candidate& winner = candidates[sel.index];

  result.box = winner.proposed_box;
  result.scale = winner.scale_factor;
  result.s_m = peaks[winner.source_peak].norm_score;
  result.s_c = sel.s_c;

  GateDecision decision{true, GateReason::scores_pass};
  if (cfg.variant == Variant::full) {
    decision = should_update(peaks, result.s_m, result.s_c, state_.history, cfg.gammas);
    result.gate = decision;
  }

  if (decision.update) {
    const auto& cc = cfg.classifier;
    const auto samples = generate_samples(frame, result.box, sample_config(cc), frame_seed());
    const bool both = std::ranges::any_of(samples, [](const auto& s) {
                        return s.label == SampleLabel::foreground;
                      }) && std::ranges::any_of(samples, [](const auto& s) {
                        return s.label == SampleLabel::background;
                      });
    if (both) {
      fine_tune(state_.head, samples, cc.update_iters, cc.lr_update, cc.momentum);
      result.updated = true;
    }
  }

  state_.history.record(result.s_m, result.s_c);
  state_.current_box = result.box;
  return result;
}

std::vector<TrackResult> track_sequence(std::span<const Image> frames,
                                        const BoundingBox& first_box, const Hyperparams& config) {
  if (frames.empty()) throw InputError("track_sequence: no frames");
  CascadeTracker tracker(frames[0], first_box, config);
  std::vector<TrackResult> results;
  results.reserve(frames.size());
  TrackResult first;
  first.box = first_box;
  results.push_back(first);
  for (std::size_t i = 1; i < frames.size(); ++i) results.push_back(tracker.track_frame(frames[i]));
  return results;
}

}  // namespace casiam

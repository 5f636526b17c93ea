#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "casiam/candidates.hpp"
#include "casiam/classifier.hpp"
#include "casiam/config.hpp"
#include "casiam/embedding.hpp"
#include "casiam/gate.hpp"
#include "casiam/matching.hpp"

namespace casiam {

struct TrackResult {
  BoundingBox box;
  double s_m = 1.0;  // normalized similarity of the winning peak
  double s_c = 1.0;  // target probability of the winning candidate
  bool updated = false;
  int peak_count = 1;
  double scale = 1.0;                 // scale factor of the winning candidate
  std::optional<GateDecision> gate;  // empty when the gate was not consulted
};

struct TrackerState {
  BoundingBox current_box;
  Tensor3 exemplar_feat;  // fixed after init
  ClassifierHead head;
  ScoreHistory history;
  int frame_index = 0;
  Hyperparams config;
};

/// Per-frame cascade: candidate crop -> embed -> similarity map -> peaks ->
/// scaled candidates -> classifier selection -> gated fine-tune. One instance
/// tracks one sequence; it is not safe to call track_frame concurrently.
class CascadeTracker {
 public:
  /// Crops and embeds the exemplar, seeds the classifier and trains it on
  /// samples drawn around the first-frame box. Throws InputError on a
  /// degenerate box or invalid config.
  CascadeTracker(const Image& first_frame, const BoundingBox& first_box, Hyperparams config);

  TrackResult track_frame(const Image& frame);

  const TrackerState& state() const { return state_; }
  const Embedding& embedding() const { return *embedding_; }

 private:
  std::uint64_t frame_seed() const;

  std::unique_ptr<Embedding> embedding_;
  std::vector<double> scales_;
  TrackerState state_;
};

/// Initializes on frames[0] with first_box and tracks the rest. The first
/// result is first_box itself with both scores 1.
std::vector<TrackResult> track_sequence(std::span<const Image> frames,
                                        const BoundingBox& first_box, const Hyperparams& config);

}  // namespace casiam

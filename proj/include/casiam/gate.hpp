#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>

#include "casiam/matching.hpp"

namespace casiam {

struct ScoreEntry {
  double s_m = 0.0;  // similarity score of the frame's optimal result
  double s_c = 0.0;  // classification score of the frame's optimal result
};

/// Scores of the last n frames; the oldest entry is evicted first.
class ScoreHistory {
 public:
  explicit ScoreHistory(std::size_t capacity = 6);

  /// Throws InputError on non-finite scores.
  void record(double s_m, double s_c);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const std::deque<ScoreEntry>& entries() const { return entries_; }

  bool operator==(const ScoreHistory&) const = default;

 private:
  std::size_t capacity_;
  std::deque<ScoreEntry> entries_;
};

/// Arithmetic means of the stored entries, or nothing for an empty history.
std::optional<ScoreEntry> historical_means(const ScoreHistory& history);

enum class GateReason { single_peak, scores_pass, similarity_fail, classification_fail, warmup };
std::string_view to_string(GateReason reason);

struct GateDecision {
  bool update = false;
  GateReason reason = GateReason::warmup;
};

struct GateThresholds {
  double gamma_p = 0.75;
  double gamma_m = 0.8;
  double gamma_c = 0.6;
};

/// Update rule for the classifier:
///  - no history yet: update (warmup);
///  - exactly one peak at ratio gamma_p: update (single_peak);
///  - otherwise update only if s_m > gamma_m * mean(S_M) and s_c > gamma_c * mean(S_C),
///    reporting the first failing test, similarity first.
GateDecision should_update(std::span<const Peak> peaks, double s_m, double s_c,
                           const ScoreHistory& history, const GateThresholds& gammas);

/// Same rule with the qualifying-peak count supplied directly.
GateDecision should_update(std::size_t qualifying_peaks, double s_m, double s_c,
                           const ScoreHistory& history, const GateThresholds& gammas);

}  // namespace casiam

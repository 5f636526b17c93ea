#include "casiam/gate.hpp"

#include <algorithm>
#include <cmath>

#include "casiam/types.hpp"

namespace casiam {

ScoreHistory::ScoreHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InputError("score history capacity must be >= 1");
}

void ScoreHistory::record(double s_m, double s_c) {
  if (!std::isfinite(s_m) || !std::isfinite(s_c)) {
    throw InputError("score history only accepts finite scores");
  }
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back({s_m, s_c});
}

std::optional<ScoreEntry> historical_means(const ScoreHistory& history) {
  if (history.empty()) return std::nullopt;
  ScoreEntry sum;
  for (const auto& e : history.entries()) {
    sum.s_m += e.s_m;
    sum.s_c += e.s_c;
  }
  const double n = static_cast<double>(history.size());
  return ScoreEntry{sum.s_m / n, sum.s_c / n};
}

std::string_view to_string(GateReason reason) {
  switch (reason) {
    case GateReason::single_peak: return "single_peak";
    case GateReason::scores_pass: return "scores_pass";
    case GateReason::similarity_fail: return "similarity_fail";
    case GateReason::classification_fail: return "classification_fail";
    case GateReason::warmup: return "warmup";
  }
  return "unknown";
}

GateDecision should_update(std::size_t qualifying_peaks, double s_m, double s_c,
                           const ScoreHistory& history, const GateThresholds& gammas) {
  const auto means = historical_means(history);
  if (!means) return {true, GateReason::warmup};
  if (qualifying_peaks <= 1) return {true, GateReason::single_peak};
  if (!(s_m > gammas.gamma_m * means->s_m)) return {false, GateReason::similarity_fail};
  if (!(s_c > gammas.gamma_c * means->s_c)) return {false, GateReason::classification_fail};
  return {true, GateReason::scores_pass};
}

GateDecision should_update(std::span<const Peak> peaks, double s_m, double s_c,
                           const ScoreHistory& history, const GateThresholds& gammas) {
  if (peaks.empty()) throw InputError("should_update: peak list is empty");
  const auto qualifying = std::ranges::count_if(
      peaks, [&](const Peak& p) { return p.norm_score >= gammas.gamma_p; });
  return should_update(static_cast<std::size_t>(qualifying), s_m, s_c, history, gammas);
}

}  // namespace casiam

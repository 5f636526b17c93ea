#include "casiam/matching.hpp"

#include <algorithm>
#include <vector>

#include "casiam/imaging.hpp"

namespace casiam {

SimilarityMap similarity(const Tensor3& exemplar_feat, const Tensor3& candidate_feat, float bias,
                         int map_stride, double candidate_side) {
  if (map_stride < 1) throw InputError("similarity: map_stride must be >= 1");
  SimilarityMap map;
  map.scores = xcorr_valid(candidate_feat, exemplar_feat, bias);
  map.map_stride = map_stride;
  map.candidate_side = candidate_side;
  map.candidate_center = {0.5 * (candidate_side - 1), 0.5 * (candidate_side - 1)};
  return map;
}

Point2 peak_to_image(int row, int col, const SimilarityMap& map) {
  const Point2 mc = map.map_center();
  return {map.candidate_center.x + (col - mc.x) * map.map_stride,
          map.candidate_center.y + (row - mc.y) * map.map_stride};
}

std::vector<Peak> find_peaks(const SimilarityMap& map, double gamma_p) {
  const ScoreGrid& g = map.scores;
  if (g.rows < 1 || g.cols < 1) throw InputError("find_peaks: empty map");
  if (!(gamma_p > 0.0 && gamma_p <= 1.0)) throw InputError("find_peaks: gamma_p must be in (0, 1]");

  const auto [lo_it, hi_it] = std::minmax_element(g.values.begin(), g.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  auto make_peak = [&](int r, int c, double norm) {
    Peak p;
    p.row = r;
    p.col = c;
    p.score = g.at(r, c);
    p.norm_score = norm;
    p.image_pos = peak_to_image(r, c, map);
    return p;
  };

  if (hi == lo) return {make_peak((g.rows - 1) / 2, (g.cols - 1) / 2, 1.0)};

  const double range = hi - lo;
  auto is_local_max = [&](int r, int c) {
    const float v = g.at(r, c);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const int rr = r + dr, cc = c + dc;
        if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= g.rows || cc >= g.cols) continue;
        if (g.at(rr, cc) > v) return false;
      }
    }
    return true;
  };

  std::vector<char> qualifies(g.values.size(), 0);
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) qualifies[r * g.cols + c] = is_local_max(r, c);

  // Flood-fill equal-valued plateaus of local maxima; the first cell met in
  // row-major order represents the whole plateau.
  std::vector<char> seen(g.values.size(), 0);
  std::vector<int> stack;
  std::vector<Peak> peaks;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const int idx = r * g.cols + c;
      if (!qualifies[idx] || seen[idx]) continue;
      const float v = g.values[idx];
      seen[idx] = 1;
      stack.assign(1, idx);
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cr = cur / g.cols, ccol = cur % g.cols;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = cr + dr, cc = ccol + dc;
            if (rr < 0 || cc < 0 || rr >= g.rows || cc >= g.cols) continue;
            const int nidx = rr * g.cols + cc;
            if (!seen[nidx] && qualifies[nidx] && g.values[nidx] == v) {
              seen[nidx] = 1;
              stack.push_back(nidx);
            }
          }
        }
      }
      const double norm = (v - lo) / range;
      if (norm >= gamma_p) peaks.push_back(make_peak(r, c, norm));
    }
  }

  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.norm_score > b.norm_score; });
  return peaks;
}

}  // namespace casiam

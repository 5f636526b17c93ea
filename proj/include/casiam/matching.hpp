#pragma once

#include <vector>

#include "casiam/types.hpp"

namespace casiam {

/// Similarity score map f(z, x) = phi(z) * phi(x) + b, together with the
/// geometry needed to map cells back into candidate-image pixels.
struct SimilarityMap {
  ScoreGrid scores;
  int map_stride = 1;          // candidate-image pixels per cell
  Point2 candidate_center;     // candidate-image pixel that the map center looks at
  double candidate_side = 0;   // candidate image side, pixels

  /// Fractional center cell; the zero-displacement position.
  Point2 map_center() const {
    return {0.5 * (scores.cols - 1), 0.5 * (scores.rows - 1)};
  }
};

struct Peak {
  int row = 0;
  int col = 0;
  float score = 0.0f;       // raw map value
  double norm_score = 0.0;  // (v - min) / (max - min), in [0, 1]
  Point2 image_pos;         // candidate-image pixels
};

/// Cross-correlates the exemplar features over the candidate features.
/// `candidate_side` defaults the center to the middle pixel of the candidate.
SimilarityMap similarity(const Tensor3& exemplar_feat, const Tensor3& candidate_feat, float bias,
                         int map_stride, double candidate_side);

/// All 8-neighbourhood local maxima whose min-max normalized score is at least
/// gamma_p, sorted by norm_score descending then row-major. Never empty: the
/// global maximum always qualifies, and a constant map yields its center cell.
/// A connected plateau of equal maxima is reported once, at its row-major-first
/// cell.
std::vector<Peak> find_peaks(const SimilarityMap& map, double gamma_p);

/// candidate_center + (cell - map_center) * map_stride, no sub-cell refinement.
Point2 peak_to_image(int row, int col, const SimilarityMap& map);

}  // namespace casiam

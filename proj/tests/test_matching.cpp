#include <doctest.h>

#include <algorithm>
#include <random>

#include "casiam/embedding.hpp"
#include "casiam/matching.hpp"
#include "oracles.hpp"

using namespace casiam;

namespace {

SimilarityMap wrap(ScoreGrid g, int stride = 8, double side = 255) {
  SimilarityMap m;
  m.scores = std::move(g);
  m.map_stride = stride;
  m.candidate_side = side;
  m.candidate_center = {0.5 * (side - 1), 0.5 * (side - 1)};
  return m;
}

}  // namespace

TEST_CASE("self-match peaks at the planted offset") {
  std::mt19937_64 rng(1);
  const Tensor3 cand = oracle::random_tensor(rng, 16, 22, 22);
  Tensor3 ex(16, 6, 6);
  for (int c = 0; c < 16; ++c)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) ex.at(c, y, x) = cand.at(c, 4 + y, 11 + x);
  const SimilarityMap m = similarity(ex, cand, 0.0f, 8, 255);
  const auto peaks = find_peaks(m, 0.75);
  CHECK(peaks.front().row == 4);
  CHECK(peaks.front().col == 11);
  CHECK(peaks.front().norm_score == 1.0);
}

TEST_CASE("bias does not move the maximum") {
  std::mt19937_64 rng(2);
  const Tensor3 cand = oracle::random_tensor(rng, 16, 22, 22);
  const Tensor3 ex = oracle::random_tensor(rng, 16, 6, 6);
  const auto a = find_peaks(similarity(ex, cand, 0.0f, 8, 255), 0.5);
  const auto b = find_peaks(similarity(ex, cand, 5.0f, 8, 255), 0.5);
  CHECK(a.front().row == b.front().row);
  CHECK(a.front().col == b.front().col);
}

TEST_CASE("17x17 map equals the brute-force correlation") {
  std::mt19937_64 rng(3);
  const Tensor3 cand = oracle::random_tensor(rng, 16, 22, 22);
  const Tensor3 ex = oracle::random_tensor(rng, 16, 6, 6);
  const SimilarityMap m = similarity(ex, cand, 0.25f, 8, 255);
  REQUIRE(m.scores.rows == 17);
  REQUIRE(m.scores.cols == 17);
  const auto ref = oracle::xcorr(cand, ex, 0.25);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(m.scores.values[i] - ref[i]) <= 1e-4);
}

TEST_CASE("peak counting on constructed maps") {
  ScoreGrid g(9, 9, 0.0f);
  g.at(2, 3) = 10.0f;
  CHECK(find_peaks(wrap(g), 0.75).size() == 1);

  g.at(6, 6) = 8.0f;
  const auto two = find_peaks(wrap(g), 0.75);
  REQUIRE(two.size() == 2);
  CHECK(two[0].row == 2);
  CHECK(two[0].norm_score == 1.0);
  CHECK(two[1].row == 6);
  CHECK(two[1].norm_score == doctest::Approx(0.8));
  CHECK(find_peaks(wrap(g), 0.81).size() == 1);
}

TEST_CASE("constant map yields its center cell") {
  const auto peaks = find_peaks(wrap(ScoreGrid(17, 17, 3.0f)), 0.75);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].row == 8);
  CHECK(peaks[0].col == 8);
  CHECK(peaks[0].norm_score == 1.0);
}

TEST_CASE("a plateau is reported once at its first cell") {
  ScoreGrid g(6, 6, 0.0f);
  g.at(2, 2) = g.at(2, 3) = g.at(3, 3) = 5.0f;
  const auto peaks = find_peaks(wrap(g), 0.5);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].row == 2);
  CHECK(peaks[0].col == 2);
}

TEST_CASE("ties in score keep row-major order") {
  ScoreGrid g(7, 7, 0.0f);
  g.at(5, 1) = 4.0f;
  g.at(1, 5) = 4.0f;
  const auto peaks = find_peaks(wrap(g), 0.9);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].row == 1);
  CHECK(peaks[1].row == 5);
}

TEST_CASE("find_peaks matches brute-force enumeration on random maps") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(1, 32), level(0, 5);
  std::uniform_real_distribution<float> real(-3.0f, 3.0f);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreGrid g(dim(rng), dim(rng));
    // Half the maps are coarse-valued so plateaus actually occur.
    const bool coarse = trial % 2 == 0;
    for (float& v : g.values) v = coarse ? static_cast<float>(level(rng)) : real(rng);
    std::vector<oracle::Cell> prev;
    for (double gamma : {0.5, 0.75, 0.9}) {
      const auto peaks = find_peaks(wrap(g), gamma);
      std::vector<oracle::Cell> got;
      for (const auto& p : peaks) got.push_back({p.row, p.col});
      std::sort(got.begin(), got.end());
      CHECK(got == oracle::local_maxima(g, gamma));
      CHECK_FALSE(peaks.empty());
      CHECK(peaks.front().norm_score == 1.0);
      for (std::size_t i = 1; i < peaks.size(); ++i)
        CHECK(peaks[i - 1].norm_score >= peaks[i].norm_score);
      if (gamma > 0.5) CHECK(std::includes(prev.begin(), prev.end(), got.begin(), got.end()));
      prev = got;
    }
  }
}

TEST_CASE("gamma_p outside (0, 1] is rejected") {
  ScoreGrid g(3, 3, 0.0f);
  CHECK_THROWS_AS(find_peaks(wrap(g), 0.0), InputError);
  CHECK_THROWS_AS(find_peaks(wrap(g), 1.5), InputError);
  CHECK_THROWS_AS(find_peaks(wrap(ScoreGrid()), 0.5), InputError);
}

TEST_CASE("peak cells map back to candidate pixels") {
  const SimilarityMap m = wrap(ScoreGrid(17, 17), 8, 256);
  CHECK(m.candidate_center.x == 127.5);
  const Point2 c = peak_to_image(8, 8, m);
  CHECK(c.x == 127.5);
  CHECK(c.y == 127.5);
  const Point2 right = peak_to_image(8, 9, m);
  CHECK(right.x == 135.5);
  CHECK(right.y == 127.5);
  const Point2 corner = peak_to_image(0, 0, m);
  CHECK(corner.x == 63.5);
  CHECK(corner.y == 63.5);
}

TEST_CASE("identity self-match recovers a planted image offset") {
  std::mt19937_64 rng(5);
  const Image frame = oracle::random_image(rng, 60, 60, 1);
  Image ex(21, 21, 1);
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x) ex.at(y, x) = frame.at(30 + 7 + y - 10, 30 - 4 + x - 10);
  // Exemplar is centered on frame pixel (x 26, y 37); candidate center is (29.5, 29.5).
  IdentityEmbedding e;
  const SimilarityMap m = similarity(e.embed(ex), e.embed(frame), 0.0f, 1, 60);
  const Peak best = find_peaks(m, 0.75).front();
  CHECK(std::abs(best.image_pos.x - 26.0) <= 0.5);
  CHECK(std::abs(best.image_pos.y - 37.0) <= 0.5);
}

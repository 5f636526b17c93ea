#include <doctest.h>

#include <cmath>
#include <random>

#include "casiam/candidates.hpp"
#include "casiam/eval_io.hpp"
#include "casiam/imaging.hpp"
#include "oracles.hpp"

using namespace casiam;

TEST_CASE("context-padded crop sides") {
  const BoundingBox box{200, 200, 63.5, 63.5};
  CHECK(CropGeometry::context_margin(box) == 31.75);
  CHECK(CropGeometry::exemplar_side(box) == 127.0);
  CHECK(CropGeometry::candidate_side(box) == 254.0);
  const BoundingBox thin{0, 0, 10, 40};
  CHECK(CropGeometry::candidate_side(thin) > CropGeometry::exemplar_side(thin));
  CHECK(CropGeometry::exemplar_side(thin) > 0.0);
}

TEST_CASE("exemplar crop with a 127 px context square is undistorted") {
  std::mt19937_64 rng(1);
  const Image frame = oracle::random_image(rng, 400, 400, 3);
  const BoundingBox box{200, 180, 63.5, 63.5};
  const Image ex = exemplar_crop(frame, box, 127);
  CHECK(ex == crop_padded(frame, {200, 180}, 127));
}

TEST_CASE("exemplar crop of a constant frame is constant") {
  const Image frame(100, 120, 3, 77.0f);
  const Image ex = exemplar_crop(frame, {5, 5, 20, 30}, 127);
  CHECK(ex.height() == 127);
  for (float v : ex.data()) CHECK(v == doctest::Approx(77.0f));
}

TEST_CASE("exemplar crop at the frame corner pads with the frame mean") {
  std::mt19937_64 rng(2);
  const Image frame = oracle::random_image(rng, 80, 90, 3);
  const auto means = channel_means(frame);
  const Image ex = exemplar_crop(frame, {0, 0, 30, 30}, 127);
  for (int c = 0; c < 3; ++c) {
    CHECK(ex.at(0, 0, c) == means[c]);
    CHECK(ex.at(10, 5, c) == means[c]);
  }
}

TEST_CASE("candidate crop geometry") {
  std::mt19937_64 rng(3);
  const Image frame = oracle::random_image(rng, 500, 500, 3);
  const BoundingBox box{250, 250, 63.5, 63.5};
  const PatchCrop crop = candidate_crop(frame, box, 255);
  CHECK(crop.patch.height() == 255);
  CHECK(crop.patch.width() == 255);
  CHECK(crop.frame_per_patch == doctest::Approx(254.0 / 255.0));
  CHECK(crop.frame_center.x == 250.0);

  std::uniform_real_distribution<double> d(-50, 300);
  for (int i = 0; i < 100; ++i) {
    const Point2 p{d(rng), d(rng)};
    const Point2 back = crop.to_patch(crop.to_frame(p));
    CHECK(std::abs(back.x - p.x) < 1e-6);
    CHECK(std::abs(back.y - p.y) < 1e-6);
  }
  const Point2 mid = crop.to_frame(crop.patch_center());
  CHECK(mid.x == 250.0);
  CHECK(mid.y == 250.0);
}

TEST_CASE("centered candidate crop in a large frame needs no padding") {
  Image frame(600, 600, 1);
  for (int y = 0; y < 600; ++y)
    for (int x = 0; x < 600; ++x) frame.at(y, x) = static_cast<float>(x);
  const PatchCrop crop = candidate_crop(frame, {300, 300, 63.5, 63.5}, 255);
  // Every sample lies inside the frame, so each value is an interpolation of
  // real pixels: the ramp's x coordinate, never the frame mean.
  for (int x = 0; x < 255; ++x) {
    const double fx = crop.to_frame({double(x), 0}).x;
    CHECK(crop.patch.at(127, x) == doctest::Approx(fx).epsilon(1e-6));
  }
}

TEST_CASE("scale sets") {
  const auto s = scale_set(1.02, 3);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(1.0 / 1.02));
  CHECK(s[1] == 1.0);
  CHECK(s[2] == 1.02);
  CHECK(scale_set(1.05, 5).size() == 5);
  CHECK_THROWS_AS(scale_set(1.02, 2), InputError);
  CHECK_THROWS_AS(scale_set(0.0, 3), InputError);
}

TEST_CASE("candidate cardinality and ordering") {
  std::mt19937_64 rng(4);
  const Image frame = oracle::random_image(rng, 200, 200, 3);
  const BoundingBox box{100, 100, 30, 24};
  const auto scales = scale_set(1.02, 3);

  const std::vector<Point2> one{{100, 100}};
  CHECK(make_candidates(frame, one, box, scales).size() == 3);

  const std::vector<Point2> two{{90, 95}, {120, 101}};
  const auto cands = make_candidates(frame, two, box, scales);
  REQUIRE(cands.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(cands[i].source_peak == i / 3);
    CHECK(cands[i].scale_factor == scales[i % 3]);
    CHECK(cands[i].patch.height() == 107);
    CHECK(cands[i].patch.width() == 107);
    CHECK(cands[i].proposed_box.w == doctest::Approx(30 * scales[i % 3]));
    CHECK(cands[i].proposed_box.h == doctest::Approx(24 * scales[i % 3]));
    CHECK(cands[i].proposed_box.cx == two[i / 3].x);
  }
  CHECK_THROWS_AS(make_candidates(frame, std::vector<Point2>{}, box, scales), InputError);
}

TEST_CASE("candidate patch center sees the blob center") {
  SynthSpec spec;
  spec.noise = 0.0;
  spec.frames = 1;
  const Sequence seq = synth_sequence(spec);
  const BoundingBox gt = seq.gt[0];
  const std::vector<Point2> at{gt.center()};
  const std::vector<double> unit{1.0};
  const auto c = make_candidates(seq.frames[0], at, gt, unit, 107);
  for (int ch = 0; ch < 3; ++ch) {
    CHECK(c[0].patch.at(53, 53, ch) == seq.frames[0].at(int(gt.cy), int(gt.cx), ch));
    CHECK(c[0].patch.at(53, 53, ch) == 0.5f * spec.target.color[ch]);
  }
}

TEST_CASE("candidate geometry re-projects onto the peak and grows with scale") {
  std::mt19937_64 rng(5);
  const Image frame = oracle::random_image(rng, 120, 160, 3);
  for (double side : {10.0, 31.0, 47.3}) {
    const BoundingBox box{70.3, 55.8, side, side * 0.8};
    const std::vector<Point2> pos{{70.3, 55.8}, {10.2, 100.9}};
    const auto cands = make_candidates(frame, pos, box, scale_set(1.02, 3));
    for (const auto& c : cands) {
      const Point2 p = c.geometry.to_frame(c.geometry.patch_center());
      CHECK(std::abs(p.x - c.image_pos.x) <= 0.5);
      CHECK(std::abs(p.y - c.image_pos.y) <= 0.5);
    }
    for (int peak = 0; peak < 2; ++peak) {
      CHECK(cands[3 * peak].geometry.frame_per_patch < cands[3 * peak + 1].geometry.frame_per_patch);
      CHECK(cands[3 * peak + 1].geometry.frame_per_patch < cands[3 * peak + 2].geometry.frame_per_patch);
    }
  }
}

TEST_CASE("peak positions are clamped near the frame") {
  const Image frame(50, 60, 1, 0.0f);
  PatchCrop crop;
  crop.out_side = 255;
  crop.frame_center = {30, 25};
  crop.frame_per_patch = 2.0;
  Peak far;
  far.image_pos = {254, 0};
  const Peak peaks[] = {far};
  const auto pos = peak_frame_positions(peaks, crop, frame, 20.0);
  CHECK(pos[0].x == 69.0);
  CHECK(pos[0].y == -10.0);
}

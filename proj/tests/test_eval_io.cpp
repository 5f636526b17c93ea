#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "casiam/eval_io.hpp"
#include "casiam/image_io.hpp"
#include "oracles.hpp"

using namespace casiam;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<BoundingBox> shifted(std::vector<BoundingBox> boxes, double dx) {
  for (auto& b : boxes) b.cx += dx;
  return boxes;
}

}  // namespace

TEST_CASE("ground-truth convention") {
  const auto b = parse_boxes("10,20,30,40\n");
  REQUIRE(b.size() == 1);
  CHECK(b[0].cx == 24.5);
  CHECK(b[0].cy == 39.5);
  CHECK(b[0].w == 30);
  CHECK(b[0].h == 40);
  const auto xywh = to_xywh(b[0]);
  CHECK(xywh[0] == 10);
  CHECK(xywh[3] == 40);
  CHECK(parse_boxes("10\t20\t30\t40\n# c\n\n1 2 3 4\r\n") ==
        parse_boxes("10,20,30,40\n1,2,3,4\n"));
  CHECK(parse_boxes("1.5,2,3,4,0.9\n")[0].w == 3);
}

TEST_CASE("malformed box lines name their source") {
  try {
    parse_boxes("1,2,3,4\n1,2,x,4\n", "gt.txt");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("gt.txt:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_boxes("1,2,3\n"), InputError);
}

TEST_CASE("synthetic motion is exact") {
  SynthSpec spec;
  const Sequence seq = synth_sequence(spec);
  REQUIRE(seq.frames.size() == 50);
  REQUIRE(seq.annotated());
  for (int t = 1; t < 50; ++t) {
    CHECK(seq.gt[t].cx - seq.gt[t - 1].cx == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(seq.gt[t].cy == seq.gt[0].cy);
  }
  for (const Image& f : seq.frames)
    for (float v : f.data()) CHECK(v == std::round(v));

  SynthSpec zoom;
  zoom.zoom = 1.01;
  zoom.target.vx = 0.0;
  zoom.target.cx = 160;
  zoom.frames = 20;
  const Sequence z = synth_sequence(zoom);
  for (int t = 1; t < 20; ++t) CHECK(z.gt[t].w / z.gt[t - 1].w == doctest::Approx(1.01));

  const Sequence again = synth_sequence(spec);
  CHECK(again.frames == seq.frames);
  CHECK(again.gt == seq.gt);
  SynthSpec other = spec;
  other.seed = 2;
  CHECK_FALSE(synth_sequence(other).frames == seq.frames);
}

TEST_CASE("blobs leaving the frame are rejected") {
  SynthSpec spec;
  spec.target.vx = 10.0;
  CHECK_THROWS_AS(synth_sequence(spec), InputError);
  SynthSpec d;
  BlobSpec blob;
  blob.cx = 300;
  blob.vx = 5;
  d.distractor = blob;
  CHECK_THROWS_AS(synth_sequence(d), InputError);
}

TEST_CASE("synthetic specs from key-values") {
  KeyValues kv{{"frame.count", "7"}, {"target.vx", "-1.5"}, {"distractor.r", "10"}};
  const SynthSpec s = synth_spec_from(kv);
  CHECK(s.frames == 7);
  CHECK(s.target.vx == -1.5);
  REQUIRE(s.distractor.has_value());
  CHECK(s.distractor->color[0] == 10.0f);
  CHECK_THROWS_AS(synth_spec_from({{"target.z", "1"}}), InputError);
}

TEST_CASE("save and load round trip") {
  TempDir dir("casiam_test_seq");
  SynthSpec spec;
  spec.frames = 4;
  spec.target.w = 30.25;
  const Sequence seq = synth_sequence(spec);
  save_sequence(seq, dir.path / "s");
  const Sequence back = load_sequence(dir.path / "s");
  CHECK(back.frames == seq.frames);
  REQUIRE(back.gt.size() == seq.gt.size());
  for (std::size_t i = 0; i < seq.gt.size(); ++i) {
    CHECK(back.gt[i].cx == doctest::Approx(seq.gt[i].cx).epsilon(1e-9));
    CHECK(back.gt[i].w == doctest::Approx(seq.gt[i].w).epsilon(1e-9));
  }
}

TEST_CASE("init-only and inconsistent annotations") {
  TempDir dir("casiam_test_init_only");
  SynthSpec spec;
  spec.frames = 5;
  Sequence seq = synth_sequence(spec);
  seq.gt.resize(1);
  save_sequence(seq, dir.path / "a");
  const Sequence a = load_sequence(dir.path / "a");
  CHECK(a.frames.size() == 5);
  CHECK_FALSE(a.annotated());

  seq.gt.assign(3, seq.gt[0]);
  save_sequence(seq, dir.path / "b");
  CHECK_THROWS_AS(load_sequence(dir.path / "b"), InputError);
  CHECK_THROWS_AS(load_sequence(dir.path / "missing"), InputError);
  fs::remove(dir.path / "a" / "groundtruth_rect.txt");
  CHECK_THROWS_AS(load_sequence(dir.path / "a"), InputError);
}

TEST_CASE("precision curve cases") {
  const std::vector<BoundingBox> gt(10, BoundingBox{50, 50, 20, 20});
  const Curve same = precision_curve(gt, gt);
  REQUIRE(same.thresholds.size() == 51);
  for (double v : same.values) CHECK(v == 1.0);

  const Curve off = precision_curve(shifted(gt, 25.0), gt);
  CHECK(off.values[20] == 0.0);
  CHECK(precision_at_20(off) == 0.0);
  CHECK(off.values[24] == 0.0);
  CHECK(off.values[25] == 1.0);

  auto mixed = gt;
  for (int i = 5; i < 10; ++i) mixed[i].cy += 100.0;
  CHECK(precision_at_20(precision_curve(mixed, gt)) == 0.5);

  CHECK_THROWS_AS(precision_curve(std::span(gt).first(3), gt), InputError);
  CHECK_THROWS_AS(precision_curve(std::span<const BoundingBox>{}, std::span<const BoundingBox>{}),
                  InputError);
}

TEST_CASE("success curve cases") {
  const std::vector<BoundingBox> gt(4, BoundingBox{10, 10, 1, 1});
  const Curve same = success_curve(gt, gt);
  REQUIRE(same.thresholds.size() == 21);
  for (double v : same.values) CHECK(v == 1.0);
  CHECK(success_auc(same) == 1.0);
  CHECK(mean_iou(gt, gt) == 1.0);

  const auto half = shifted(gt, 0.5);
  CHECK(iou(half[0], gt[0]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(mean_iou(half, gt) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const Curve s = success_curve(half, gt);
  for (std::size_t k = 0; k < s.thresholds.size(); ++k)
    CHECK(s.values[k] == (s.thresholds[k] <= 1.0 / 3.0 ? 1.0 : 0.0));

  const Curve apart = success_curve(shifted(gt, 5.0), gt);
  CHECK(apart.values[0] == 1.0);
  for (std::size_t k = 1; k < apart.values.size(); ++k) CHECK(apart.values[k] == 0.0);
}

TEST_CASE("curve monotonicity on random boxes") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(0, 100), side(1, 40);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BoundingBox> r(30), g(30);
    for (int i = 0; i < 30; ++i) {
      g[i] = {pos(rng), pos(rng), side(rng), side(rng)};
      r[i] = {g[i].cx + pos(rng) / 5 - 10, g[i].cy + pos(rng) / 5 - 10, side(rng), side(rng)};
      CHECK(iou(r[i], g[i]) == doctest::Approx(iou(g[i], r[i])));
      CHECK(iou(r[i], g[i]) >= 0.0);
      CHECK(iou(r[i], g[i]) < 1.0);
    }
    const Curve p = precision_curve(r, g), s = success_curve(r, g);
    for (std::size_t k = 1; k < p.values.size(); ++k) CHECK(p.values[k] >= p.values[k - 1]);
    for (std::size_t k = 1; k < s.values.size(); ++k) CHECK(s.values[k] <= s.values[k - 1]);
  }
}

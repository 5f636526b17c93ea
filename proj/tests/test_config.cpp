#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "casiam/config.hpp"

using namespace casiam;

TEST_CASE("defaults") {
  const Hyperparams p;
  CHECK(p.gammas.gamma_p == 0.75);
  CHECK(p.gammas.gamma_m == 0.8);
  CHECK(p.gammas.gamma_c == 0.6);
  CHECK(p.history_n == 6);
  CHECK(p.scale_step == 1.02);
  CHECK(p.scale_count == 3);
  CHECK(p.exemplar_size == 127);
  CHECK(p.candidate_size == 255);
  CHECK(p.classifier.patch_size == 107);
  CHECK(p.classifier.hidden == 512);
  CHECK(p.classifier.momentum == 0.9);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("key=value parsing") {
  const auto kv = parse_key_values("# comment\n\n gate.gamma_p = 0.5 \r\nembedding.name=identity\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("gate.gamma_p") == "0.5");
  CHECK(kv.at("embedding.name") == "identity");
  CHECK_THROWS_AS(parse_key_values("no equals sign\n"), InputError);
}

TEST_CASE("settings") {
  Hyperparams p;
  apply_setting(p, "gate.gamma_m", "0.7");
  CHECK(p.gammas.gamma_m == 0.7);
  apply_setting(p, "tracker.variant", "no_gate");
  CHECK(p.variant == Variant::no_gate);
  apply_setting(p, "classifier.seed", "18446744073709551615");
  CHECK(p.classifier.seed == 18446744073709551615ull);
  CHECK_THROWS_AS(apply_setting(p, "gate.gamma_q", "1"), InputError);
  CHECK_THROWS_AS(apply_setting(p, "gate.n", "six"), InputError);
  CHECK_THROWS_AS(apply_setting(p, "gate.n", "6.5"), InputError);
  CHECK_THROWS_AS(apply_setting(p, "gate.gamma_m", "0.7x"), InputError);
  CHECK_THROWS_AS(apply_setting(p, "tracker.variant", "fast"), InputError);
}

TEST_CASE("validation") {
  auto invalid = [](const char* key, const char* value) {
    Hyperparams p;
    apply_setting(p, key, value);
    CHECK_THROWS_AS(p.validate(), InputError);
  };
  invalid("gate.gamma_p", "0");
  invalid("gate.gamma_c", "1.5");
  invalid("gate.n", "0");
  invalid("scales.count", "2");
  invalid("scales.step", "0.9");
  invalid("size.candidate", "100");
  invalid("classifier.neg_scale", "0.5");
}

TEST_CASE("key-value round trip and hashing") {
  Hyperparams p;
  apply_setting(p, "gate.gamma_p", "0.6");
  apply_setting(p, "embedding.name", "identity");
  apply_setting(p, "matching.bias", "0.125");
  const KeyValues kv = to_key_values(p);
  Hyperparams q;
  for (const auto& [k, v] : kv) apply_setting(q, k, v);
  CHECK(to_key_values(q) == kv);
  CHECK(config_hash(q) == config_hash(p));
  CHECK(config_hash(p).size() == 16);
  CHECK_FALSE(config_hash(p) == config_hash(Hyperparams{}));
  CHECK(config_hash(Hyperparams{}) == config_hash(Hyperparams{}));
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "casiam_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.conf";
  {
    std::ofstream f(path);
    f << "gate.n = 4\nscales.step = 1.05\n";
  }
  const Hyperparams p = load_config(path);
  CHECK(p.history_n == 4);
  CHECK(p.scale_step == 1.05);
  CHECK_THROWS_AS(load_config(dir / "missing.conf"), InputError);
  {
    std::ofstream f(path);
    f << "gate.gamma_p = 2\n";
  }
  CHECK_THROWS_AS(load_config(path), InputError);
  std::filesystem::remove_all(dir);
}

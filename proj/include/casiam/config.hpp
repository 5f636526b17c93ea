#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "casiam/classifier.hpp"
#include "casiam/gate.hpp"

namespace casiam {

/// Which parts of the cascade run each frame.
enum class Variant {
  full,           // matching -> classifier -> gated fine-tune
  no_gate,        // matching -> classifier -> fine-tune every frame
  matching_only,  // global-max peak at scale 1, classifier never consulted
};
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct Hyperparams {
  GateThresholds gammas;  // 0.75 / 0.8 / 0.6
  int history_n = 6;
  double scale_step = 1.02;
  int scale_count = 3;
  int exemplar_size = 127;
  int candidate_size = 255;
  float matching_bias = 0.0f;
  std::string embedding_name = "fixed_conv";
  std::uint64_t embedding_seed = 1;
  ClassifierConfig classifier;  // classifier.patch_size is the 107 input side
  Variant variant = Variant::full;

  /// Throws InputError describing the first violated constraint.
  void validate() const;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

/// Sets one dotted key (e.g. "gate.gamma_p"). Unknown keys and malformed
/// values are InputErrors.
void apply_setting(Hyperparams& params, std::string_view key, std::string_view value);
Hyperparams load_config(const std::filesystem::path& path);

/// Every key with its current value, in key order; feeding this back through
/// apply_setting reproduces the same parameters.
KeyValues to_key_values(const Hyperparams& params);
std::string to_text(const KeyValues& kv);

/// 64-bit FNV-1a over the canonical key=value text, as 16 hex digits.
std::string config_hash(const Hyperparams& params);
std::uint64_t fnv1a64(std::string_view bytes);

/// Strict numeric parsing shared by config and synthetic-spec readers.
double parse_double(std::string_view key, std::string_view value);
std::int64_t parse_int(std::string_view key, std::string_view value);
std::uint64_t parse_u64(std::string_view key, std::string_view value);
std::string format_double(double v);

}  // namespace casiam

#include "casiam/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "casiam/embedding.hpp"

namespace casiam {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::no_gate: return "no_gate";
    case Variant::matching_only: return "matching_only";
  }
  return "full";
}

Variant parse_variant(std::string_view s) {
  if (s == "full") return Variant::full;
  if (s == "no_gate") return Variant::no_gate;
  if (s == "matching_only") return Variant::matching_only;
  throw InputError("unknown tracker variant '" + std::string(s) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw InputError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": " +
                   what);
}

}  // namespace

double parse_double(std::string_view key, std::string_view value) {
  value = trim(value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
    bad_value(key, value, "expected a finite number");
  }
  return v;
}

std::int64_t parse_int(std::string_view key, std::string_view value) {
  value = trim(value);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "expected an integer");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  value = trim(value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "expected an unsigned integer");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

struct Field {
  std::string_view key;
  std::function<void(Hyperparams&, std::string_view, std::string_view)> set;
  std::function<std::string(const Hyperparams&)> get;
};

template <typename M>
Field real_field(std::string_view key, M member) {
  return {key,
          [member](Hyperparams& p, std::string_view k, std::string_view v) {
            std::invoke(member, p) = static_cast<std::remove_reference_t<decltype(std::invoke(member, p))>>(
                parse_double(k, v));
          },
          [member](const Hyperparams& p) {
            return format_double(static_cast<double>(std::invoke(member, p)));
          }};
}

template <typename M>
Field int_field(std::string_view key, M member) {
  return {key,
          [member](Hyperparams& p, std::string_view k, std::string_view v) {
            const auto x = parse_int(k, v);
            if (x < -2147483647 || x > 2147483647) bad_value(k, v, "out of range");
            std::invoke(member, p) = static_cast<int>(x);
          },
          [member](const Hyperparams& p) { return std::to_string(std::invoke(member, p)); }};
}

template <typename M>
Field seed_field(std::string_view key, M member) {
  return {key,
          [member](Hyperparams& p, std::string_view k, std::string_view v) {
            std::invoke(member, p) = parse_u64(k, v);
          },
          [member](const Hyperparams& p) { return std::to_string(std::invoke(member, p)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real_field("gate.gamma_p", [](auto& p) -> auto& { return p.gammas.gamma_p; }));
    f.push_back(real_field("gate.gamma_m", [](auto& p) -> auto& { return p.gammas.gamma_m; }));
    f.push_back(real_field("gate.gamma_c", [](auto& p) -> auto& { return p.gammas.gamma_c; }));
    f.push_back(int_field("gate.n", [](auto& p) -> auto& { return p.history_n; }));
    f.push_back(real_field("scales.step", [](auto& p) -> auto& { return p.scale_step; }));
    f.push_back(int_field("scales.count", [](auto& p) -> auto& { return p.scale_count; }));
    f.push_back(int_field("size.exemplar", [](auto& p) -> auto& { return p.exemplar_size; }));
    f.push_back(int_field("size.candidate", [](auto& p) -> auto& { return p.candidate_size; }));
    f.push_back(
        int_field("size.classifier", [](auto& p) -> auto& { return p.classifier.patch_size; }));
    f.push_back(real_field("matching.bias", [](auto& p) -> auto& { return p.matching_bias; }));
    f.push_back({"embedding.name",
                 [](Hyperparams& p, std::string_view, std::string_view v) {
                   p.embedding_name = std::string(trim(v));
                 },
                 [](const Hyperparams& p) { return p.embedding_name; }});
    f.push_back(seed_field("embedding.seed", [](auto& p) -> auto& { return p.embedding_seed; }));
    f.push_back(
        int_field("classifier.hidden", [](auto& p) -> auto& { return p.classifier.hidden; }));
    f.push_back(int_field("classifier.init_iters",
                          [](auto& p) -> auto& { return p.classifier.init_iters; }));
    f.push_back(int_field("classifier.update_iters",
                          [](auto& p) -> auto& { return p.classifier.update_iters; }));
    f.push_back(
        real_field("classifier.lr_init", [](auto& p) -> auto& { return p.classifier.lr_init; }));
    f.push_back(real_field("classifier.lr_update",
                           [](auto& p) -> auto& { return p.classifier.lr_update; }));
    f.push_back(
        real_field("classifier.momentum", [](auto& p) -> auto& { return p.classifier.momentum; }));
    f.push_back(int_field("classifier.pos_samples",
                          [](auto& p) -> auto& { return p.classifier.pos_samples; }));
    f.push_back(int_field("classifier.neg_samples",
                          [](auto& p) -> auto& { return p.classifier.neg_samples; }));
    f.push_back(
        real_field("classifier.pos_iou", [](auto& p) -> auto& { return p.classifier.pos_iou; }));
    f.push_back(
        real_field("classifier.neg_iou", [](auto& p) -> auto& { return p.classifier.neg_iou; }));
    f.push_back(real_field("classifier.neg_shift",
                           [](auto& p) -> auto& { return p.classifier.neg_shift; }));
    f.push_back(real_field("classifier.neg_scale",
                           [](auto& p) -> auto& { return p.classifier.neg_scale; }));
    f.push_back(seed_field("classifier.seed", [](auto& p) -> auto& { return p.classifier.seed; }));
    f.push_back({"tracker.variant",
                 [](Hyperparams& p, std::string_view, std::string_view v) {
                   p.variant = parse_variant(trim(v));
                 },
                 [](const Hyperparams& p) { return std::string(to_string(p.variant)); }});
    return f;
  }();
  return table;
}

}  // namespace

void Hyperparams::validate() const {
  auto ratio = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw InputError(std::string(name) + " must be in (0, 1]");
  };
  ratio(gammas.gamma_p, "gate.gamma_p");
  ratio(gammas.gamma_m, "gate.gamma_m");
  ratio(gammas.gamma_c, "gate.gamma_c");
  if (history_n < 1) throw InputError("gate.n must be >= 1");
  if (!(scale_step >= 1.0)) throw InputError("scales.step must be >= 1");
  if (scale_count < 1 || scale_count % 2 == 0) throw InputError("scales.count must be odd");
  if (exemplar_size < 1 || candidate_size < 1 || classifier.patch_size < 1) {
    throw InputError("patch sizes must be positive");
  }
  if (candidate_size < exemplar_size) throw InputError("size.candidate must be >= size.exemplar");
  if (classifier.hidden < 1) throw InputError("classifier.hidden must be >= 1");
  if (classifier.init_iters < 0 || classifier.update_iters < 0) {
    throw InputError("classifier iteration counts must be >= 0");
  }
  if (classifier.lr_init < 0 || classifier.lr_update < 0) {
    throw InputError("classifier learning rates must be >= 0");
  }
  if (!(classifier.momentum >= 0.0 && classifier.momentum < 1.0)) {
    throw InputError("classifier.momentum must be in [0, 1)");
  }
  if (classifier.pos_samples < 1 || classifier.neg_samples < 1) {
    throw InputError("classifier sample counts must be >= 1");
  }
  if (!(classifier.neg_iou < classifier.pos_iou)) {
    throw InputError("classifier.neg_iou must be below classifier.pos_iou");
  }
  if (!(classifier.neg_shift > 0.0)) throw InputError("classifier.neg_shift must be positive");
  if (!(classifier.neg_scale >= 1.0)) throw InputError("classifier.neg_scale must be >= 1");
  const auto emb = make_embedding(embedding_name, embedding_seed);
  if (!emb->spec().accepts(exemplar_size)) {
    throw InputError("size.exemplar is smaller than the embedding's receptive field");
  }
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("line " + std::to_string(line_no) + ": empty key");
    kv.insert_or_assign(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply_setting(Hyperparams& params, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(params, key, value);
      return;
    }
  }
  throw InputError("unknown config key '" + std::string(key) + "'");
}

Hyperparams load_config(const std::filesystem::path& path) {
  Hyperparams p;
  for (const auto& [k, v] : read_key_values(path)) apply_setting(p, k, v);
  p.validate();
  return p;
}

KeyValues to_key_values(const Hyperparams& params) {
  KeyValues kv;
  for (const auto& f : fields()) kv.emplace(std::string(f.key), f.get(params));
  return kv;
}

std::string to_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Hyperparams& params) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_text(to_key_values(params)))));
  return buf;
}

}  // namespace casiam

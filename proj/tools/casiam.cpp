#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "casiam/config.hpp"
#include "casiam/eval_io.hpp"
#include "casiam/image_io.hpp"
#include "casiam/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace casiam;

namespace {

constexpr const char* kTrackerName = "casiam-cascade";

// Collects outputs under temporary names and renames them into place only
// when every file has been written, so a failed command leaves nothing behind.
class StagedOutputs {
 public:
  StagedOutputs() = default;
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;

  ~StagedOutputs() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [tmp, _] : staged_) fs::remove_all(tmp, ec);
  }

  fs::path stage(const fs::path& final_path) {
    fs::path tmp = final_path;
    tmp += ".partial";
    std::error_code ec;
    fs::remove_all(tmp, ec);
    staged_.emplace_back(tmp, final_path);
    return tmp;
  }

  void commit() {
    for (const auto& [tmp, final_path] : staged_) {
      if (fs::is_directory(final_path)) fs::remove_all(final_path);
      fs::rename(tmp, final_path);
    }
    committed_ = true;
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> staged_;
  bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

fs::path sibling(const fs::path& out, std::string_view suffix) {
  fs::path p = out;
  p += std::string(suffix);
  return p;
}

void check_output_parent(const fs::path& out) {
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw InputError("output directory does not exist: " + parent.string());
  }
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool render = false;
  std::vector<std::string> settings;
};

std::pair<std::string, std::string> split_setting(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InputError("--set expects key=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

Hyperparams resolve_config(const CommonOptions& opt) {
  Hyperparams params = opt.config_path.empty() ? Hyperparams{} : load_config(opt.config_path);
  if (opt.seed) {
    params.embedding_seed = *opt.seed;
    params.classifier.seed = *opt.seed;
  }
  for (const auto& s : opt.settings) {
    const auto [k, v] = split_setting(s);
    apply_setting(params, k, v);
  }
  params.validate();
  return params;
}

std::string results_text(std::span<const TrackResult> results, const std::string& hash) {
  std::string text = std::string("# tracker=") + kTrackerName + " config_hash=" + hash + "\n";
  text += "# x,y,w,h,s_m,s_c,updated\n";
  for (const auto& r : results) {
    text += format_box(r.box) + "," + format_double(r.s_m) + "," + format_double(r.s_c) + "," +
            (r.updated ? "1" : "0") + "\n";
  }
  return text;
}

json manifest_json(const Sequence& seq, const Hyperparams& params,
                   std::span<const TrackResult> results) {
  json config = json::object();
  for (const auto& [k, v] : to_key_values(params)) config[k] = v;

  json frames = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto xywh = to_xywh(r.box);
    json f = {{"frame", i + 1},
              {"box", {xywh[0], xywh[1], xywh[2], xywh[3]}},
              {"s_m", r.s_m},
              {"s_c", r.s_c},
              {"updated", r.updated},
              {"peaks", r.peak_count},
              {"scale", r.scale}};
    if (r.gate) {
      f["gate"] = {{"update", r.gate->update}, {"reason", std::string(to_string(r.gate->reason))}};
    } else {
      f["gate"] = nullptr;
    }
    frames.push_back(std::move(f));
  }

  return {{"tracker", kTrackerName},
          {"sequence", seq.name},
          {"frame_count", seq.frames.size()},
          {"config", std::move(config)},
          {"config_hash", config_hash(params)},
          {"seeds",
           {{"embedding", params.embedding_seed}, {"classifier", params.classifier.seed}}},
          {"frames", std::move(frames)}};
}

std::string curve_csv(const Curve& c) {
  std::string text = "threshold,value\n";
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    text += format_double(c.thresholds[i]) + "," + format_double(c.values[i]) + "\n";
  }
  return text;
}

void render_frames(const Sequence& seq, std::span<const TrackResult> results,
                   const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < results.size(); ++i) {
    Image img = draw_box(seq.frames[i], results[i].box, {255.0f, 255.0f, 0.0f});
    if (seq.annotated()) img = draw_box(img, seq.gt[i], {0.0f, 255.0f, 0.0f});
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.png", i + 1);
    write_png(dir / name, img);
  }
}

int cmd_track(const std::string& sequence_dir, const CommonOptions& opt) {
  if (opt.out.empty()) throw InputError("track: --out is required");
  const fs::path out = opt.out;
  check_output_parent(out);
  const Hyperparams params = resolve_config(opt);
  const Sequence seq = load_sequence(sequence_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const auto results = track_sequence(seq.frames, seq.gt.front(), params);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  StagedOutputs staged;
  const std::string hash = config_hash(params);
  write_text(staged.stage(out), results_text(results, hash));
  write_text(staged.stage(sibling(out, ".manifest.json")),
             manifest_json(seq, params, results).dump(2) + "\n");
  const json timing = {{"seconds", seconds},
                       {"frames", results.size()},
                       {"fps", seconds > 0.0 ? static_cast<double>(results.size()) / seconds : 0.0}};
  write_text(staged.stage(sibling(out, ".timing.json")), timing.dump(2) + "\n");
  if (opt.render) render_frames(seq, results, staged.stage(sibling(out, ".frames")));
  staged.commit();

  std::cerr << seq.name << ": " << results.size() << " frames in " << seconds << " s\n";
  return 0;
}

std::vector<BoundingBox> read_gt(const fs::path& gt_path) {
  if (fs::is_directory(gt_path)) {
    for (const char* name : {"groundtruth_rect.txt", "groundtruth.txt"}) {
      if (fs::exists(gt_path / name)) return read_boxes(gt_path / name);
    }
    throw InputError("no ground-truth file in " + gt_path.string());
  }
  if (!fs::exists(gt_path)) throw InputError("ground-truth file not found: " + gt_path.string());
  return read_boxes(gt_path);
}

struct Metrics {
  Curve precision;
  Curve success;
  double precision20 = 0.0;
  double auc = 0.0;
  double mean_iou = 0.0;
};

Metrics evaluate(std::span<const BoundingBox> results, std::span<const BoundingBox> gt) {
  if (results.empty()) throw InputError("results contain no boxes");
  if (gt.size() == 1 && results.size() > 1) {
    throw InputError("ground truth is init-only; evaluation needs one box per frame");
  }
  Metrics m;
  m.precision = precision_curve(results, gt);
  m.success = success_curve(results, gt);
  m.precision20 = precision_at_20(m.precision);
  m.auc = success_auc(m.success);
  m.mean_iou = mean_iou(results, gt);
  return m;
}

int cmd_eval(const std::string& results_path, const std::string& gt_path,
             const CommonOptions& opt) {
  if (opt.out.empty()) throw InputError("eval: --out is required");
  const fs::path out = opt.out;
  check_output_parent(out);
  if (!fs::exists(results_path)) throw InputError("results file not found: " + results_path);
  const auto results = read_boxes(results_path);
  const auto gt = read_gt(gt_path);
  const Metrics m = evaluate(results, gt);

  fs::path base = out;
  base.replace_extension();
  StagedOutputs staged;
  write_text(staged.stage(out), "metric,value\nprecision20," + format_double(m.precision20) +
                                    "\nauc," + format_double(m.auc) + "\nmean_iou," +
                                    format_double(m.mean_iou) + "\n");
  write_text(staged.stage(sibling(base, ".precision.csv")), curve_csv(m.precision));
  write_text(staged.stage(sibling(base, ".success.csv")), curve_csv(m.success));
  staged.commit();
  return 0;
}

bool replaceable_dir(const fs::path& dir) {
  if (!fs::exists(dir)) return true;
  if (!fs::is_directory(dir)) return false;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename();
    if (name != "img" && name != "groundtruth_rect.txt") return false;
  }
  return true;
}

int cmd_synth(const std::string& spec_path, const CommonOptions& opt) {
  if (opt.out.empty()) throw InputError("synth: --out is required");
  const fs::path out = opt.out;
  check_output_parent(out);
  if (!replaceable_dir(out)) {
    throw InputError("refusing to overwrite " + out.string() + ": not a sequence directory");
  }
  KeyValues kv = spec_path.empty() ? KeyValues{} : read_key_values(spec_path);
  for (const auto& s : opt.settings) {
    const auto [k, v] = split_setting(s);
    kv[k] = v;
  }
  if (opt.seed) kv["seed"] = std::to_string(*opt.seed);
  SynthSpec spec = synth_spec_from(kv);
  if (spec.name == SynthSpec{}.name) spec.name = out.filename().string();
  const Sequence seq = synth_sequence(spec);

  StagedOutputs staged;
  save_sequence(seq, staged.stage(out));
  staged.commit();
  return 0;
}

int cmd_ablate(const std::string& sequence_dir, const CommonOptions& opt) {
  if (opt.out.empty()) throw InputError("ablate: --out is required");
  const fs::path out = opt.out;
  check_output_parent(out);
  const Hyperparams base = resolve_config(opt);
  const Sequence seq = load_sequence(sequence_dir);
  if (!seq.annotated()) throw InputError("ablate needs one ground-truth box per frame");

  std::string table = "variant,auc,precision20,mean_iou\n";
  for (Variant v : {Variant::matching_only, Variant::no_gate, Variant::full}) {
    Hyperparams params = base;
    params.variant = v;
    const auto results = track_sequence(seq.frames, seq.gt.front(), params);
    std::vector<BoundingBox> boxes;
    for (const auto& r : results) boxes.push_back(r.box);
    const Metrics m = evaluate(boxes, seq.gt);
    table += std::string(to_string(v)) + "," + format_double(m.auc) + "," +
             format_double(m.precision20) + "," + format_double(m.mean_iou) + "\n";
  }

  StagedOutputs staged;
  write_text(staged.stage(out), table);
  staged.commit();
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "Hyperparameter file (key = value lines)");
  cmd->add_option("--seed", opt.seed, "Seed for the embedding and classifier");
  cmd->add_option("--out", opt.out, "Output path");
  cmd->add_flag("--render", opt.render, "Write frames with boxes burned in");
  cmd->add_option("--set", opt.settings, "Override a parameter, key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded Siamese tracker"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string sequence_dir, results_path, gt_path, spec_path;

  auto* track = app.add_subcommand("track", "Track a sequence directory");
  track->add_option("sequence", sequence_dir, "Sequence directory")->required();
  add_common(track, opt);

  auto* eval = app.add_subcommand("eval", "Score a results file against ground truth");
  eval->add_option("results", results_path, "Results file")->required();
  eval->add_option("groundtruth", gt_path, "Ground-truth file or sequence directory")->required();
  add_common(eval, opt);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
  synth->add_option("spec", spec_path, "Synthetic spec file (optional)");
  add_common(synth, opt);

  auto* ablate = app.add_subcommand("ablate", "Compare tracker variants on one sequence");
  ablate->add_option("sequence", sequence_dir, "Annotated sequence directory")->required();
  add_common(ablate, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*track) return cmd_track(sequence_dir, opt);
    if (*eval) return cmd_eval(results_path, gt_path, opt);
    if (*synth) return cmd_synth(spec_path, opt);
    if (*ablate) return cmd_ablate(sequence_dir, opt);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

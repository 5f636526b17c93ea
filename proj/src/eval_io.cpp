#include "casiam/eval_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "casiam/image_io.hpp"

namespace fs = std::filesystem;

namespace casiam {

BoundingBox box_from_xywh(double x, double y, double w, double h) {
  return {x + 0.5 * (w - 1.0), y + 0.5 * (h - 1.0), w, h};
}

std::array<double, 4> to_xywh(const BoundingBox& box) {
  return {box.cx - 0.5 * (box.w - 1.0), box.cy - 0.5 * (box.h - 1.0), box.w, box.h};
}

std::vector<BoundingBox> parse_boxes(std::string_view text, std::string_view source) {
  std::vector<BoundingBox> boxes;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    std::vector<double> fields;
    std::size_t pos = 0;
    while (pos < line.size() && fields.size() < 4) {
      const auto start = line.find_first_not_of(" \t\r,", pos);
      if (start == std::string_view::npos) break;
      auto end = line.find_first_of(" \t\r,", start);
      if (end == std::string_view::npos) end = line.size();
      const std::string where = std::string(source) + ":" + std::to_string(line_no);
      fields.push_back(parse_double(where, line.substr(start, end - start)));
      pos = end;
    }
    if (fields.size() < 4) {
      throw InputError(std::string(source) + ":" + std::to_string(line_no) +
                       ": expected x,y,w,h");
    }
    const BoundingBox b = box_from_xywh(fields[0], fields[1], fields[2], fields[3]);
    if (!b.valid()) {
      throw InputError(std::string(source) + ":" + std::to_string(line_no) +
                       ": width and height must be positive");
    }
    boxes.push_back(b);
  }
  return boxes;
}

std::vector<BoundingBox> read_boxes(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_boxes(ss.str(), path.string());
}

std::string format_box(const BoundingBox& box) {
  const auto v = to_xywh(box);
  return format_double(v[0]) + "," + format_double(v[1]) + "," + format_double(v[2]) + "," +
         format_double(v[3]);
}

void write_boxes(const fs::path& path, std::span<const BoundingBox> boxes,
                 std::string_view header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (!header.empty()) out << "# " << header << "\n";
  for (const auto& b : boxes) out << format_box(b) << "\n";
}

namespace {

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

}  // namespace

Sequence load_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("sequence directory not found: " + dir.string());
  const fs::path img_dir = dir / "img";
  if (!fs::is_directory(img_dir)) throw InputError("missing image folder " + img_dir.string());

  fs::path gt_path = dir / "groundtruth_rect.txt";
  if (!fs::exists(gt_path)) gt_path = dir / "groundtruth.txt";
  if (!fs::exists(gt_path)) {
    throw InputError("missing ground-truth file in " + dir.string() +
                     " (groundtruth_rect.txt or groundtruth.txt)");
  }

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(img_dir)) {
    if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
  }
  std::ranges::sort(files);
  if (files.empty()) throw InputError("no images in " + img_dir.string());

  Sequence seq;
  seq.name = dir.filename().string();
  if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
  seq.gt = read_boxes(gt_path);
  if (seq.gt.size() != 1 && seq.gt.size() != files.size()) {
    throw InputError("ground truth has " + std::to_string(seq.gt.size()) + " boxes for " +
                     std::to_string(files.size()) + " frames (expected 1 or one per frame)");
  }
  seq.frames.reserve(files.size());
  for (const auto& f : files) seq.frames.push_back(read_image(f));
  return seq;
}

void save_sequence(const Sequence& seq, const fs::path& dir) {
  fs::create_directories(dir / "img");
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.png", i + 1);
    write_png(dir / "img" / name, seq.frames[i]);
  }
  write_boxes(dir / "groundtruth_rect.txt", seq.gt);
}

SynthSpec synth_spec_from(const KeyValues& kv) {
  SynthSpec spec;
  BlobSpec distractor;
  bool has_distractor = false;
  auto blob_key = [](BlobSpec& b, std::string_view field, std::string_view key,
                     std::string_view value) {
    const double v = parse_double(key, value);
    if (field == "cx") b.cx = v;
    else if (field == "cy") b.cy = v;
    else if (field == "w") b.w = v;
    else if (field == "h") b.h = v;
    else if (field == "vx") b.vx = v;
    else if (field == "vy") b.vy = v;
    else if (field == "r") b.color[0] = static_cast<float>(v);
    else if (field == "g") b.color[1] = static_cast<float>(v);
    else if (field == "b") b.color[2] = static_cast<float>(v);
    else throw InputError("unknown synth key '" + std::string(key) + "'");
  };
  for (const auto& [key, value] : kv) {
    const std::string_view k = key;
    if (k == "name") spec.name = value;
    else if (k == "frame.width") spec.width = static_cast<int>(parse_int(k, value));
    else if (k == "frame.height") spec.height = static_cast<int>(parse_int(k, value));
    else if (k == "frame.count") spec.frames = static_cast<int>(parse_int(k, value));
    else if (k == "zoom") spec.zoom = parse_double(k, value);
    else if (k == "noise") spec.noise = parse_double(k, value);
    else if (k == "background") spec.background = static_cast<float>(parse_double(k, value));
    else if (k == "seed") spec.seed = parse_u64(k, value);
    else if (k.starts_with("target.")) blob_key(spec.target, k.substr(7), k, value);
    else if (k.starts_with("distractor.")) {
      blob_key(distractor, k.substr(11), k, value);
      has_distractor = true;
    } else {
      throw InputError("unknown synth key '" + key + "'");
    }
  }
  if (has_distractor) spec.distractor = distractor;
  return spec;
}

namespace {

BoundingBox blob_box(const BlobSpec& b, double zoom, int t) {
  const double g = std::pow(zoom, t);
  return {b.cx + b.vx * t, b.cy + b.vy * t, b.w * g, b.h * g};
}

bool fits(const BoundingBox& b, int width, int height) {
  return b.cx - 0.5 * b.w >= -0.5 && b.cx + 0.5 * b.w <= width - 0.5 &&
         b.cy - 0.5 * b.h >= -0.5 && b.cy + 0.5 * b.h <= height - 0.5;
}

// Fraction of pixel [p - 0.5, p + 0.5] inside [lo, hi].
double cover(int p, double lo, double hi) {
  return std::max(0.0, std::min(p + 0.5, hi) - std::max(p - 0.5, lo));
}

void paint_rect(std::vector<double>& canvas, int width, int height, const BoundingBox& b,
                std::array<float, 3> color) {
  const double x0 = b.cx - 0.5 * b.w, x1 = b.cx + 0.5 * b.w;
  const double y0 = b.cy - 0.5 * b.h, y1 = b.cy + 0.5 * b.h;
  const int xs = std::max(0, static_cast<int>(std::floor(x0))),
            xe = std::min(width - 1, static_cast<int>(std::ceil(x1)));
  const int ys = std::max(0, static_cast<int>(std::floor(y0))),
            ye = std::min(height - 1, static_cast<int>(std::ceil(y1)));
  const std::size_t plane = static_cast<std::size_t>(width) * height;
  for (int y = ys; y <= ye; ++y) {
    const double cy = cover(y, y0, y1);
    if (cy <= 0.0) continue;
    for (int x = xs; x <= xe; ++x) {
      const double a = cy * cover(x, x0, x1);
      if (a <= 0.0) continue;
      for (int c = 0; c < 3; ++c) {
        double& v = canvas[c * plane + static_cast<std::size_t>(y) * width + x];
        v = v * (1.0 - a) + color[c] * a;
      }
    }
  }
}

void paint_blob(std::vector<double>& canvas, int width, int height, const BoundingBox& b,
                std::array<float, 3> color) {
  paint_rect(canvas, width, height, b, color);
  const BoundingBox core{b.cx, b.cy, 0.5 * b.w, 0.5 * b.h};
  paint_rect(canvas, width, height, core, {0.5f * color[0], 0.5f * color[1], 0.5f * color[2]});
}

}  // namespace

Sequence synth_sequence(const SynthSpec& spec) {
  if (spec.width < 2 || spec.height < 2) throw InputError("synth: frame must be at least 2x2");
  if (spec.frames < 1) throw InputError("synth: frame.count must be >= 1");
  if (!(spec.zoom > 0.0)) throw InputError("synth: zoom must be positive");
  if (spec.noise < 0.0) throw InputError("synth: noise must be >= 0");
  if (!(spec.target.w > 0.0 && spec.target.h > 0.0)) {
    throw InputError("synth: target size must be positive");
  }
  for (int t = 0; t < spec.frames; ++t) {
    if (!fits(blob_box(spec.target, spec.zoom, t), spec.width, spec.height)) {
      throw InputError("synth: target leaves the frame at frame " + std::to_string(t + 1));
    }
    if (spec.distractor && !fits(blob_box(*spec.distractor, spec.zoom, t), spec.width,
                                 spec.height)) {
      throw InputError("synth: distractor leaves the frame at frame " + std::to_string(t + 1));
    }
  }

  Sequence seq;
  seq.name = spec.name;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t plane = static_cast<std::size_t>(spec.width) * spec.height;
  for (int t = 0; t < spec.frames; ++t) {
    std::vector<double> canvas(3 * plane, spec.background);
    if (spec.distractor) {
      paint_blob(canvas, spec.width, spec.height, blob_box(*spec.distractor, spec.zoom, t),
                 spec.distractor->color);
    }
    const BoundingBox target = blob_box(spec.target, spec.zoom, t);
    paint_blob(canvas, spec.width, spec.height, target, spec.target.color);

    Image frame(spec.height, spec.width, 3);
    auto data = frame.data();
    for (std::size_t i = 0; i < canvas.size(); ++i) {
      const double v = canvas[i] + (spec.noise > 0.0 ? spec.noise * noise(rng) : 0.0);
      data[i] = static_cast<float>(std::clamp(std::round(v), 0.0, 255.0));
    }
    seq.frames.push_back(std::move(frame));
    seq.gt.push_back(target);
  }
  return seq;
}

namespace {

void check_lengths(std::span<const BoundingBox> results, std::span<const BoundingBox> gt) {
  if (results.empty()) throw InputError("no result boxes to evaluate");
  if (results.size() != gt.size()) {
    throw InputError("result count " + std::to_string(results.size()) +
                     " does not match ground-truth count " + std::to_string(gt.size()));
  }
}

}  // namespace

Curve precision_curve(std::span<const BoundingBox> results, std::span<const BoundingBox> gt) {
  check_lengths(results, gt);
  std::vector<double> errors(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) errors[i] = center_error(results[i], gt[i]);
  Curve c;
  for (int t = 0; t <= 50; ++t) {
    const auto hits = std::ranges::count_if(errors, [t](double e) { return e <= t; });
    c.thresholds.push_back(t);
    c.values.push_back(static_cast<double>(hits) / static_cast<double>(errors.size()));
  }
  return c;
}

double precision_at_20(const Curve& precision) { return precision.values.at(20); }

Curve success_curve(std::span<const BoundingBox> results, std::span<const BoundingBox> gt) {
  check_lengths(results, gt);
  std::vector<double> overlaps(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) overlaps[i] = iou(results[i], gt[i]);
  Curve c;
  for (int k = 0; k <= 20; ++k) {
    const double t = k / 20.0;
    const auto hits = std::ranges::count_if(overlaps, [t](double o) { return o >= t; });
    c.thresholds.push_back(t);
    c.values.push_back(static_cast<double>(hits) / static_cast<double>(overlaps.size()));
  }
  return c;
}

double success_auc(const Curve& success) {
  double s = 0.0;
  for (double v : success.values) s += v;
  return s / static_cast<double>(success.values.size());
}

double mean_iou(std::span<const BoundingBox> results, std::span<const BoundingBox> gt) {
  check_lengths(results, gt);
  double s = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) s += iou(results[i], gt[i]);
  return s / static_cast<double>(results.size());
}

}  // namespace casiam

#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's numeric code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "casiam/types.hpp"

namespace oracle {

using casiam::BoundingBox;
using casiam::Image;
using casiam::ScoreGrid;
using casiam::Tensor3;

inline Tensor3 random_tensor(std::mt19937_64& rng, int c, int h, int w, float lo = -1.0f,
                             float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  Tensor3 t(c, h, w);
  for (float& v : t.data()) v = d(rng);
  return t;
}

inline Image random_image(std::mt19937_64& rng, int h, int w, int channels) {
  std::uniform_int_distribution<int> d(0, 255);
  Image img(h, w, channels);
  for (float& v : img.data()) v = static_cast<float>(d(rng));
  return img;
}

// Nested-loop valid cross-correlation in double.
inline std::vector<double> xcorr(const Tensor3& cand, const Tensor3& ex, double bias) {
  const int oh = cand.height() - ex.height() + 1;
  const int ow = cand.width() - ex.width() + 1;
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int i = 0; i < oh; ++i)
    for (int j = 0; j < ow; ++j) {
      double s = 0.0;
      for (int c = 0; c < ex.channels(); ++c)
        for (int y = 0; y < ex.height(); ++y)
          for (int x = 0; x < ex.width(); ++x)
            s += static_cast<double>(cand.at(c, i + y, j + x)) * ex.at(c, y, x);
      out[static_cast<std::size_t>(i) * ow + j] = s + bias;
    }
  return out;
}

struct Cell {
  int row;
  int col;
  bool operator==(const Cell&) const = default;
  bool operator<(const Cell& o) const { return row != o.row ? row < o.row : col < o.col; }
};

// Local maxima (>= every 8-neighbour) whose min-max normalized value is at
// least gamma; an equal-valued 8-connected group of maxima counts once, at its
// first cell in row-major order. A constant grid yields its center cell.
inline std::vector<Cell> local_maxima(const ScoreGrid& g, double gamma) {
  const int n = g.rows * g.cols;
  const auto [lo_it, hi_it] = std::minmax_element(g.values.begin(), g.values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) return {{(g.rows - 1) / 2, (g.cols - 1) / 2}};

  std::vector<bool> is_max(n, false);
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) {
      bool ok = true;
      for (int dr = -1; dr <= 1 && ok; ++dr)
        for (int dc = -1; dc <= 1 && ok; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if ((dr || dc) && rr >= 0 && cc >= 0 && rr < g.rows && cc < g.cols &&
              g.at(rr, cc) > g.at(r, c))
            ok = false;
        }
      is_max[r * g.cols + c] = ok;
    }

  // Union-find over equal-valued neighbouring maxima; the root is the smallest index.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < n; ++a) {
    if (!is_max[a]) continue;
    const int r = a / g.cols, c = a % g.cols;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= g.rows || cc >= g.cols) continue;
        const int b = rr * g.cols + cc;
        if (is_max[b] && g.values[a] == g.values[b]) {
          const int ra = find(a), rb = find(b);
          if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
      }
  }

  std::vector<Cell> out;
  for (int a = 0; a < n; ++a) {
    if (!is_max[a] || find(a) != a) continue;
    if ((g.values[a] - lo) / (hi - lo) >= gamma) out.push_back({a / g.cols, a % g.cols});
  }
  return out;
}

// Corner-aligned bilinear sample of one channel at output (y, x).
inline double bilinear(const Image& img, int c, int out_h, int out_w, int y, int x) {
  const double fy = out_h > 1 ? y * double(img.height() - 1) / (out_h - 1) : 0.5 * (img.height() - 1);
  const double fx = out_w > 1 ? x * double(img.width() - 1) / (out_w - 1) : 0.5 * (img.width() - 1);
  const int y0 = static_cast<int>(std::floor(fy)), x0 = static_cast<int>(std::floor(fx));
  const int y1 = std::min(y0 + 1, img.height() - 1), x1 = std::min(x0 + 1, img.width() - 1);
  const double wy = fy - y0, wx = fx - x0;
  return (1 - wy) * ((1 - wx) * img.at(y0, x0, c) + wx * img.at(y0, x1, c)) +
         wy * ((1 - wx) * img.at(y1, x0, c) + wx * img.at(y1, x1, c));
}

// IoU from corner extents.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.cx + a.w / 2, b.cx + b.w / 2) -
                                      std::max(a.cx - a.w / 2, b.cx - b.w / 2));
  const double iy = std::max(0.0, std::min(a.cy + a.h / 2, b.cy + b.h / 2) -
                                      std::max(a.cy - a.h / 2, b.cy - b.h / 2));
  const double inter = ix * iy;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

// Central finite difference of f with respect to p[i].
template <typename F>
double central_difference(F&& f, double* p, double eps) {
  const double saved = *p;
  *p = saved + eps;
  const double up = f();
  *p = saved - eps;
  const double down = f();
  *p = saved;
  return (up - down) / (2.0 * eps);
}

}  // namespace oracle

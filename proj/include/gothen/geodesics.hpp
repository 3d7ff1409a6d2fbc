#pragma once

// Marked length spectra on the torus: shortest closed curves in a winding
// class (p, q) for a conformal metric factor * |dz|^2.
//
// Stage 1 runs shortest paths on the lifted grid graph (16-neighbour
// stencil) from basepoints on x = 0 to their translates by (p, q).
// Stage 2 relaxes the winning polyline by exact descent over normal offsets
// on the trapezoid length with bilinear √factor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "gothen/error.hpp"
#include "gothen/grid.hpp"
#include "gothen/metrics.hpp"

namespace gothen {

struct HomotopyClass {
  int p = 1;
  int q = 0;

  bool operator==(const HomotopyClass&) const = default;
  bool is_zero() const noexcept { return p == 0 && q == 0; }
  bool primitive() const noexcept { return std::gcd(std::abs(p), std::abs(q)) == 1; }
  /// Orientation with p > 0, or p == 0 and q > 0.
  HomotopyClass canonical() const noexcept {
    return (p < 0 || (p == 0 && q < 0)) ? HomotopyClass{-p, -q} : *this;
  }
  std::string label() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
};

inline std::vector<HomotopyClass> default_classes() {
  return {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}};
}

struct GeodesicOptions {
  int points = 512;               ///< polyline vertices in stage 2
  double relative_tolerance = 1e-8;
  int max_iterations = 4000;       ///< relaxation sweeps
  bool refine = true;             ///< run stage 2
  int basepoint_stride = 4;       ///< coarse basepoint sweep, refined near the best
};

using Point2 = std::array<double, 2>;

struct GeodesicResult {
  HomotopyClass cls;
  double length = 0.0;
  double stage1_length = 0.0;
  bool refined = false;       ///< stage 2 improved on stage 1
  int iterations = 0;
  std::vector<Point2> path;   ///< lifted vertices; closes at path[0] + (p, q)
};

namespace detail {

// Unit-free sampler of √(factor / max factor).
class SqrtFactor {
 public:
  explicit SqrtFactor(const RealField& factor) : grid_(factor.grid()), s_(factor.size()) {
    peak_ = max_value(factor);
    if (!(peak_ > 0.0)) throw InvalidArgument("geodesic length: metric factor vanishes identically");
    for (std::size_t k = 0; k < s_.size(); ++k) {
      if (factor[k] < 0.0 || !std::isfinite(factor[k])) {
        throw InvalidArgument("geodesic length: metric factor must be finite and nonnegative");
      }
      s_[k] = std::sqrt(factor[k] / peak_);
    }
  }

  const GridSpec& grid() const noexcept { return grid_; }
  double scale() const noexcept { return std::sqrt(peak_); }
  double node(int ix, int iy) const noexcept { return s_[grid_.index(ix, iy)]; }
  double min_node() const noexcept { return *std::min_element(s_.begin(), s_.end()); }

  /// Bilinear value and gradient at a lifted point.
  double eval(double x, double y, double* gx = nullptr, double* gy = nullptr) const noexcept {
    const double n = grid_.n();
    const double fx = x * n, fy = y * n;
    const double x0 = std::floor(fx), y0 = std::floor(fy);
    const double tx = fx - x0, ty = fy - y0;
    const int ix = static_cast<int>(x0), iy = static_cast<int>(y0);
    const double a = node(ix, iy), b = node(ix + 1, iy);
    const double c = node(ix, iy + 1), d = node(ix + 1, iy + 1);
    if (gx) *gx = n * ((b - a) * (1 - ty) + (d - c) * ty);
    if (gy) *gy = n * ((c - a) * (1 - tx) + (d - b) * tx);
    return a * (1 - tx) * (1 - ty) + b * tx * (1 - ty) + c * (1 - tx) * ty + d * tx * ty;
  }

 private:
  GridSpec grid_;
  std::vector<double> s_;
  double peak_ = 0.0;
};

inline constexpr std::array<std::array<int, 2>, 16> kStencil{{{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                                              {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
                                                              {1, 2}, {1, -2}, {-1, 2}, {-1, -2},
                                                              {2, 1}, {2, -1}, {-2, 1}, {-2, -1}}};

struct GraphPath {
  double length = std::numeric_limits<double>::infinity();
  std::vector<std::array<int, 2>> nodes;  ///< lifted integer coordinates
};

// A* from (sx, sy) to (sx + p n, sy + q n) inside the lifted window with
// margin n/2. Stops as soon as the frontier exceeds `bound`.
inline GraphPath graph_search(const SqrtFactor& s, int sx, int sy, int p, int q, double bound) {
  const int n = s.grid().n();
  const int margin = n / 2;
  const int tx = sx + p * n, ty = sy + q * n;
  const int x_lo = std::min(sx, tx) - margin, y_lo = std::min(sy, ty) - margin;
  const int w = std::abs(p) * n + 2 * margin + 1, h = std::abs(q) * n + 2 * margin + 1;
  const double hstep = 1.0 / n;
  const double s_min = s.min_node();

  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> dist(count, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> parent(count, -1);
  auto id = [&](int x, int y) {
    return static_cast<std::size_t>(y - y_lo) * static_cast<std::size_t>(w) +
           static_cast<std::size_t>(x - x_lo);
  };
  auto heuristic = [&](int x, int y) {
    return s_min * hstep * std::hypot(static_cast<double>(tx - x), static_cast<double>(ty - y));
  };

  using Entry = std::pair<double, std::int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t start = id(sx, sy), goal = id(tx, ty);
  dist[start] = 0.0;
  open.push({heuristic(sx, sy), static_cast<std::int32_t>(start)});
  while (!open.empty()) {
    const auto [f, node] = open.top();
    open.pop();
    if (f >= bound) break;
    const int x = x_lo + node % w, y = y_lo + node / w;
    const double g = dist[static_cast<std::size_t>(node)];
    if (f > g + heuristic(x, y)) continue;  // stale entry
    if (static_cast<std::size_t>(node) == goal) break;
    const double sv = s.node(x, y);
    for (const auto& [dx, dy] : kStencil) {
      const int nx = x + dx, ny = y + dy;
      if (nx < x_lo || nx >= x_lo + w || ny < y_lo || ny >= y_lo + h) continue;
      const double edge = 0.5 * (sv + s.node(nx, ny)) * hstep *
                          std::sqrt(static_cast<double>(dx * dx + dy * dy));
      const std::size_t m = id(nx, ny);
      if (g + edge < dist[m]) {
        dist[m] = g + edge;
        parent[m] = node;
        open.push({dist[m] + heuristic(nx, ny), static_cast<std::int32_t>(m)});
      }
    }
  }
  GraphPath out;
  if (!(dist[goal] < bound)) return out;
  out.length = dist[goal];
  for (std::int32_t k = static_cast<std::int32_t>(goal); k >= 0; k = parent[static_cast<std::size_t>(k)]) {
    out.nodes.push_back({x_lo + k % w, y_lo + k / w});
  }
  std::reverse(out.nodes.begin(), out.nodes.end());
  return out;
}

// Basepoints on the line transverse to the class: a sweep with the given
// stride, then every basepoint within one stride of the two best. `cls`
// must be canonical.
inline GraphPath stage_one(const SqrtFactor& s, HomotopyClass cls, int stride) {
  const int n = s.grid().n();
  stride = std::clamp(stride, 1, n);
  auto run = [&](int j, double bound) {
    const int sx = cls.p != 0 ? 0 : j;
    const int sy = cls.p != 0 ? j : 0;
    return graph_search(s, sx, sy, cls.p, cls.q, bound);
  };
  std::vector<std::pair<double, int>> sweep;
  std::vector<unsigned char> done(static_cast<std::size_t>(n), 0);
  GraphPath best;
  double runner_up = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; j += stride) {
    // Pruned at the runner-up so the two best are ranked exactly.
    auto path = run(j, runner_up);
    done[static_cast<std::size_t>(j)] = 1;
    sweep.push_back({path.length, j});
    if (path.length < best.length) {
      runner_up = best.length;
      best = std::move(path);
    } else {
      runner_up = std::min(runner_up, path.length);
    }
  }
  std::stable_sort(sweep.begin(), sweep.end());
  for (std::size_t r = 0; r < std::min<std::size_t>(2, sweep.size()); ++r) {
    for (int d = -stride + 1; d < stride; ++d) {
      const int j = ((sweep[r].second + d) % n + n) % n;
      if (done[static_cast<std::size_t>(j)]) continue;
      done[static_cast<std::size_t>(j)] = 1;
      auto path = run(j, best.length);
      if (path.length < best.length) best = std::move(path);
    }
  }
  return best;
}

// Trapezoid length of the closed polyline and its gradient.
inline double polyline_length(const SqrtFactor& s, const std::vector<double>& v, Point2 shift,
                              std::vector<double>* grad) {
  const std::size_t m = v.size() / 2;
  std::vector<double> val(m), gx(m), gy(m);
  for (std::size_t i = 0; i < m; ++i) val[i] = s.eval(v[2 * i], v[2 * i + 1], &gx[i], &gy[i]);
  if (grad) grad->assign(v.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    const double wrap = (j == 0) ? 1.0 : 0.0;
    const double dx = v[2 * j] + wrap * shift[0] - v[2 * i];
    const double dy = v[2 * j + 1] + wrap * shift[1] - v[2 * i + 1];
    const double len = std::hypot(dx, dy);
    const double avg = 0.5 * (val[i] + val[j]);
    total += len * avg;
    if (!grad) continue;
    auto& g = *grad;
    if (len > 0.0) {
      const double ux = dx / len, uy = dy / len;
      g[2 * j] += avg * ux;
      g[2 * j + 1] += avg * uy;
      g[2 * i] -= avg * ux;
      g[2 * i + 1] -= avg * uy;
    }
    g[2 * i] += 0.5 * len * gx[i];
    g[2 * i + 1] += 0.5 * len * gy[i];
    g[2 * j] += 0.5 * len * gx[j];
    g[2 * j + 1] += 0.5 * len * gy[j];
  }
  return total;
}

// Uniform resampling of the lifted graph path by Euclidean arclength.
inline std::vector<double> resample(const GraphPath& path, int n, int points) {
  std::vector<Point2> pts;
  for (const auto& [x, y] : path.nodes) pts.push_back({static_cast<double>(x) / n, static_cast<double>(y) / n});
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum.push_back(cum.back() + std::hypot(pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]));
  }
  std::vector<double> v(2 * static_cast<std::size_t>(points));
  std::size_t seg = 0;
  for (int k = 0; k < points; ++k) {
    const double target = cum.back() * k / points;
    while (seg + 2 < cum.size() && cum[seg + 1] < target) ++seg;
    const double span = cum[seg + 1] - cum[seg];
    const double t = span > 0.0 ? (target - cum[seg]) / span : 0.0;
    v[2 * k] = pts[seg][0] + t * (pts[seg + 1][0] - pts[seg][0]);
    v[2 * k + 1] = pts[seg][1] + t * (pts[seg + 1][1] - pts[seg][1]);
  }
  return v;
}

// Circular moving average of the periodic part of a lifted closed polyline,
// window of about two grid cells, applied twice. Removes the stencil
// staircase from the seed.
inline std::vector<double> smooth_seed(const std::vector<double>& v, Point2 shift, int n) {
  const std::size_t m = v.size() / 2;
  const double spacing = std::hypot(shift[0], shift[1]) / static_cast<double>(m);
  const int half = std::max(1, static_cast<int>(std::ceil(2.0 / (n * spacing))));
  std::vector<double> per(v.size()), out(v.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m);
    per[2 * i] = v[2 * i] - t * shift[0];
    per[2 * i + 1] = v[2 * i + 1] - t * shift[1];
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < m; ++i) {
      double sx = 0.0, sy = 0.0;
      for (int d = -half; d <= half; ++d) {
        const std::size_t j = (i + m + static_cast<std::size_t>(d + static_cast<int>(m))) % m;
        sx += per[2 * j];
        sy += per[2 * j + 1];
      }
      out[2 * i] = sx / (2 * half + 1);
      out[2 * i + 1] = sy / (2 * half + 1);
    }
    per.swap(out);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m);
    out[2 * i] = per[2 * i] + t * shift[0];
    out[2 * i + 1] = per[2 * i + 1] + t * shift[1];
  }
  return out;
}

struct RelaxResult {
  double length;
  int iterations;
};

// Descent by dynamic programming over normal offsets: each vertex may move
// to one of kOffsets geometrically spaced positions on its normal line and the shortest closed
// polyline through these rungs is chosen exactly, cycling over the offset of
// the first vertex. The current polyline is always a candidate, so the
// length never increases. The rung width starts at the vertex spacing,
// doubles when the optimum reaches an outer rung and halves when a sweep
// gains less than the tolerance. Sweeps stop after two consecutive changes
// below the tolerance once the width is below 1e-4 spacing.
inline RelaxResult relax(const SqrtFactor& s, std::vector<double>& v, Point2 shift,
                         const GeodesicOptions& opts) {
  constexpr int kHalf = 4;
  constexpr int kOffsets = 2 * kHalf + 1;
  // Geometric rungs reach several scales in one sweep.
  constexpr std::array<double, kOffsets> kOffsetScale{-1.0, -0.25, -1.0 / 16, -1.0 / 64, 0.0,
                                                      1.0 / 64, 1.0 / 16, 0.25, 1.0};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t m = v.size() / 2;
  double f = polyline_length(s, v, shift, nullptr);
  const double spacing = std::hypot(shift[0], shift[1]) / static_cast<double>(m);
  const double fine_width = 1e-4 * spacing;
  double width = spacing;

  std::vector<double> cx(m * kOffsets), cy(m * kOffsets), cs(m * kOffsets);
  std::vector<double> cost(m * kOffsets);
  std::vector<int> from(m * kOffsets), best_from(m * kOffsets);
  int quiet = 0, it = 0;
  for (; it < opts.max_iterations && quiet < 2; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t ip = (i + 1) % m, im = (i + m - 1) % m;
      const double tx = v[2 * ip] - v[2 * im] + (ip == 0 || i == 0 ? shift[0] : 0.0);
      const double ty = v[2 * ip + 1] - v[2 * im + 1] + (ip == 0 || i == 0 ? shift[1] : 0.0);
      const double tn = std::hypot(tx, ty);
      const double nx = tn > 0.0 ? -ty / tn : 0.0, ny = tn > 0.0 ? tx / tn : 0.0;
      for (int k = 0; k < kOffsets; ++k) {
        const double off = width * kOffsetScale[static_cast<std::size_t>(k)];
        const std::size_t c = i * kOffsets + static_cast<std::size_t>(k);
        cx[c] = v[2 * i] + off * nx;
        cy[c] = v[2 * i + 1] + off * ny;
        cs[c] = s.eval(cx[c], cy[c]);
      }
    }
    auto seg = [&](std::size_t a, std::size_t b, double bx, double by) {
      return std::hypot(bx - cx[a], by - cy[a]) * 0.5 * (cs[a] + cs[b]);
    };
    double best = kInf;
    int best_start = kHalf, best_end = kHalf;
    for (int k0 = 0; k0 < kOffsets; ++k0) {
      std::fill(cost.begin(), cost.begin() + kOffsets, kInf);
      cost[static_cast<std::size_t>(k0)] = 0.0;
      for (std::size_t i = 1; i < m; ++i) {
        for (int k = 0; k < kOffsets; ++k) {
          const std::size_t b = i * kOffsets + static_cast<std::size_t>(k);
          double c_best = kInf;
          int arg = 0;
          for (int j = 0; j < kOffsets; ++j) {
            const std::size_t a = (i - 1) * kOffsets + static_cast<std::size_t>(j);
            if (cost[a] == kInf) continue;
            const double c = cost[a] + seg(a, b, cx[b], cy[b]);
            if (c < c_best) {
              c_best = c;
              arg = j;
            }
          }
          cost[b] = c_best;
          from[b] = arg;
        }
      }
      const std::size_t start = static_cast<std::size_t>(k0);
      for (int j = 0; j < kOffsets; ++j) {
        const std::size_t a = (m - 1) * kOffsets + static_cast<std::size_t>(j);
        const double c = cost[a] + seg(a, start, cx[start] + shift[0], cy[start] + shift[1]);
        if (c < best) {
          best = c;
          best_start = k0;
          best_end = j;
          best_from = from;
        }
      }
    }
    const double gain = f - best;
    if (gain <= opts.relative_tolerance * f) {
      if (width < fine_width) ++quiet;
      width *= 0.5;
      if (gain <= 0.0) continue;
    } else {
      quiet = 0;
    }
    bool on_edge = best_start == 0 || best_start == kOffsets - 1;
    int arg = best_end;
    for (std::size_t i = m; i-- > 1;) {
      const std::size_t c = i * kOffsets + static_cast<std::size_t>(arg);
      on_edge = on_edge || arg == 0 || arg == kOffsets - 1;
      v[2 * i] = cx[c];
      v[2 * i + 1] = cy[c];
      arg = best_from[c];
    }
    const std::size_t c0 = static_cast<std::size_t>(best_start);
    v[0] = cx[c0];
    v[1] = cy[c0];
    f = polyline_length(s, v, shift, nullptr);
    if (on_edge && gain > opts.relative_tolerance * f) width = std::min(2.0 * width, 4.0 * spacing);
  }
  return {f, it};
}

}  // namespace detail

inline GeodesicResult geodesic_length_detailed(const ConformalMetric& m, HomotopyClass cls,
                                               const GeodesicOptions& opts = {}) {
  if (cls.is_zero()) throw InvalidArgument("geodesic length: class (0,0) has no closed geodesic");
  if (opts.points < 8) throw InvalidArgument("geodesic length: need at least 8 polyline points");
  const detail::SqrtFactor s(m.factor);
  const HomotopyClass c = cls.canonical();
  const int n = m.grid().n();
  auto graph = detail::stage_one(s, c, opts.basepoint_stride);

  GeodesicResult r;
  r.cls = cls;
  r.stage1_length = graph.length * s.scale();
  r.length = r.stage1_length;
  for (const auto& [x, y] : graph.nodes) r.path.push_back({static_cast<double>(x) / n, static_cast<double>(y) / n});
  r.path.pop_back();
  if (!opts.refine) return r;

  auto v = detail::resample(graph, n, opts.points);
  const Point2 shift{static_cast<double>(c.p), static_cast<double>(c.q)};
  auto smoothed = detail::smooth_seed(v, shift, n);
  if (detail::polyline_length(s, smoothed, shift, nullptr) <
      detail::polyline_length(s, v, shift, nullptr)) {
    v.swap(smoothed);
  }
  const auto relaxed = detail::relax(s, v, shift, opts);
  r.iterations = relaxed.iterations;
  if (relaxed.length < graph.length) {
    r.length = relaxed.length * s.scale();
    r.refined = true;
    r.path.clear();
    for (std::size_t i = 0; i < v.size(); i += 2) r.path.push_back({v[i], v[i + 1]});
  }
  return r;
}

inline double geodesic_length(const ConformalMetric& m, HomotopyClass cls,
                              const GeodesicOptions& opts = {}) {
  return geodesic_length_detailed(m, cls, opts).length;
}

/// Trapezoid length of a closed lifted polyline under `m`, closing at
/// path[0] + (p, q).
inline double curve_length(const ConformalMetric& m, const std::vector<Point2>& path,
                           HomotopyClass cls) {
  const detail::SqrtFactor s(m.factor);
  std::vector<double> v;
  for (const auto& p : path) {
    v.push_back(p[0]);
    v.push_back(p[1]);
  }
  return detail::polyline_length(s, v, {static_cast<double>(cls.p), static_cast<double>(cls.q)},
                                 nullptr) *
         s.scale();
}

/// |q|^{1/4} sqrt(p^2 + q_w^2) for constant q on the unit torus.
inline double flat_length_closed_form(Complex q_const, HomotopyClass c) {
  if (q_const == Complex(0.0, 0.0)) throw InvalidArgument("flat length: q = 0 has no flat metric");
  return std::pow(std::abs(q_const), 0.25) * std::hypot(static_cast<double>(c.p), static_cast<double>(c.q));
}

struct SpectrumEntry {
  HomotopyClass cls;
  double length = 0.0;
  double stage1_length = 0.0;
  bool refined = false;
};

struct SpectrumTable {
  std::vector<SpectrumEntry> entries;
  std::string provenance;
  std::optional<std::size_t> failure_index;
  std::string failure_message;

  bool complete() const noexcept { return !failure_index.has_value(); }
  double length_of(HomotopyClass c) const {
    for (const auto& e : entries) {
      if (e.cls == c) return e.length;
    }
    throw InvalidArgument("class " + c.label() + " not in spectrum table");
  }
};

/// Lengths for each class. The two orientations of a class share one
/// computation, so stored symmetric pairs agree exactly.
inline SpectrumTable spectrum(const ConformalMetric& m, const std::vector<HomotopyClass>& classes,
                              const GeodesicOptions& opts = {}) {
  if (classes.empty()) throw InvalidArgument("spectrum: class list is empty");
  SpectrumTable t;
  t.provenance = std::string(to_string(m.kind)) + ":" + m.provenance;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    try {
      const auto c = classes[i];
      auto it = std::find_if(t.entries.begin(), t.entries.end(),
                             [&](const SpectrumEntry& e) { return e.cls.canonical() == c.canonical(); });
      if (it != t.entries.end()) {
        SpectrumEntry copy = *it;
        copy.cls = c;
        t.entries.push_back(copy);
        continue;
      }
      const auto r = geodesic_length_detailed(m, c, opts);
      t.entries.push_back({c, r.length, r.stage1_length, r.refined});
    } catch (const std::exception& e) {
      t.failure_index = i;
      t.failure_message = e.what();
      break;
    }
  }
  return t;
}

/// Screening of classes against zeros of q: a class is kept when its flat
/// geodesic representative stays at periodic distance >= radius from every
/// grid point with |q| <= zero_tol * max|q|.
struct ScreenedClasses {
  std::vector<HomotopyClass> kept;
  std::vector<HomotopyClass> dropped;
  double radius = 0.0;
  std::string rule;
};

inline ScreenedClasses screen_classes(const QuarticDifferential& q,
                                      const std::vector<HomotopyClass>& classes,
                                      const GeodesicOptions& opts = {},
                                      std::optional<double> radius = std::nullopt,
                                      double zero_tol = 1e-6) {
  const GridSpec g = q.grid();
  ScreenedClasses out;
  out.radius = radius.value_or(3.0 / g.n());
  out.rule = "drop a class if its flat geodesic passes within " + std::to_string(out.radius) +
             " of a grid point with |q| <= " + std::to_string(zero_tol) + " max|q|";
  const auto mod = modulus(q.field());
  const double cut = zero_tol * max_value(mod);
  std::vector<Point2> zeros;
  for (int iy = 0; iy < g.n(); ++iy) {
    for (int ix = 0; ix < g.n(); ++ix) {
      if (mod(ix, iy) <= cut) zeros.push_back({g.coord(ix), g.coord(iy)});
    }
  }
  if (zeros.empty()) {
    out.kept = classes;
    return out;
  }
  const auto flat = metric_flat(q);
  auto periodic = [](double d) { return d - std::round(d); };
  for (const auto& c : classes) {
    const auto r = geodesic_length_detailed(flat, c, opts);
    bool near = false;
    for (const auto& p : r.path) {
      for (const auto& z : zeros) {
        if (std::hypot(periodic(p[0] - z[0]), periodic(p[1] - z[1])) < out.radius) {
          near = true;
          break;
        }
      }
      if (near) break;
    }
    (near ? out.dropped : out.kept).push_back(c);
  }
  return out;
}

}  // namespace gothen

#pragma once

// Ray studies t -> (μ0, t ν0): areas, length spectra and their ratios to
// the flat metric of q_t = t q0 along a geometric sequence of t.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gothen/geodesics.hpp"
#include "gothen/metrics.hpp"
#include "gothen/solver.hpp"
#include "gothen/verification.hpp"

namespace gothen {

/// Which factor carries the ray parameter. All three give the same q_t and,
/// by gauge invariance, the same metrics.
enum class RayScaling { nu, mu, symmetric };

inline std::string_view to_string(RayScaling s) {
  switch (s) {
    case RayScaling::nu: return "nu";
    case RayScaling::mu: return "mu";
    case RayScaling::symmetric: return "symmetric";
  }
  return "nu";
}

inline RayScaling parse_ray_scaling(std::string_view s) {
  for (auto k : {RayScaling::nu, RayScaling::mu, RayScaling::symmetric}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown ray scaling '" + std::string(s) + "'");
}

inline std::vector<double> default_t_values() {
  std::vector<double> t;
  for (int k = 0; k <= 8; ++k) t.push_back(std::ldexp(1.0, k));
  return t;
}

struct RayTolerances {
  double final_ratio = 0.05;   ///< r_h(t_max) <= 1 + this; |r_g/8 - 1| <= this; a(t_max) <= 1 + this
  double wiggle = 0.01;        ///< allowed relative increase between consecutive t
  double scaling = 1e-10;      ///< flat scaling identities
  double ratio_band = 1e-3;    ///< r_g / r_h in [√32, 8] up to this
};

struct RaySpec {
  explicit RaySpec(HiggsData b) : base(std::move(b)) {}

  HiggsData base;
  std::vector<double> t_values = default_t_values();
  std::vector<HomotopyClass> classes = default_classes();
  SolverOptions solver;
  GeodesicOptions geodesic;
  RayScaling scaling = RayScaling::nu;
  RayTolerances tolerances;
  bool screen_zeros = true;

  void validate() const {
    if (t_values.empty()) throw InvalidArgument("ray: t_values is empty");
    for (std::size_t k = 0; k < t_values.size(); ++k) {
      if (!(t_values[k] > 0.0)) throw InvalidArgument("ray: t_values must be positive");
      if (k > 0 && !(t_values[k] > t_values[k - 1])) {
        throw InvalidArgument("ray: t_values must be strictly increasing");
      }
    }
    if (classes.empty()) throw InvalidArgument("ray: class list is empty");
    for (const auto& c : classes) {
      if (c.is_zero()) throw InvalidArgument("ray: class (0,0) in class list");
    }
  }
};

inline HiggsData ray_data(const HiggsData& base, double t, RayScaling scaling) {
  const double a = scaling == RayScaling::nu ? 1.0 : scaling == RayScaling::mu ? t : std::sqrt(t);
  const double b = scaling == RayScaling::nu ? t : scaling == RayScaling::mu ? 1.0 : std::sqrt(t);
  if (a == 1.0 && b == 1.0) return base;
  return HiggsData(base.mu() * Complex(a, 0.0), base.nu() * Complex(b, 0.0), base.mu_band(),
                   base.nu_band());
}

struct RayPoint {
  double t = 0.0;
  double area_h = 0.0;
  double area_g = 0.0;
  double area_flat = 0.0;  ///< ‖q_t‖ = ∫ |q_t|^{1/2}
  double area_h_tilde = 0.0;
  SpectrumTable spectrum_h, spectrum_g, spectrum_flat, spectrum_h_tilde;
  std::vector<double> r_h;  ///< per class ℓ_h / ℓ_flat
  std::vector<double> r_g;  ///< per class ℓ_g / ℓ_flat
  double a = 0.0;           ///< area(h) / ‖q_t‖
  VerificationReport verification;
  int newton_steps = 0;
  double residual = 0.0;
};

struct ClassTrend {
  HomotopyClass cls;
  bool r_h_nonincreasing = true;
  double final_r_h = 0.0;
  double final_r_g_over_8 = 0.0;
  double rate = std::nan("");  ///< slope of log(r_h - 1) against log t
  bool sandwich = true;        ///< ℓ_flat <= ℓ_h <= ℓ_h̃ at every t (1e-6 relative)
  bool ratio_band = true;      ///< r_g / r_h in [√32, 8] wherever the f-bounds hold
};

struct RayStudyReport {
  std::vector<double> t_values;
  std::vector<HomotopyClass> classes;
  RayScaling scaling = RayScaling::nu;
  RayTolerances tolerances;
  std::vector<HomotopyClass> screened_out;
  std::string screening_rule;
  std::vector<RayPoint> points;
  std::optional<std::size_t> failure_index;
  std::string failure_message;
  std::vector<ClassTrend> trends;
  double flat_length_scaling_error = 0.0;  ///< max rel. deviation of ℓ_flat,t / t^{1/4}
  double flat_area_scaling_error = 0.0;    ///< max rel. deviation of area(flat_t) / t^{1/2}
  bool checks_passed = true;               ///< asserted verification checks at every t

  bool complete() const noexcept { return !failure_index.has_value(); }
};

namespace detail {

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::nan("");
}

inline void fill_trends(RayStudyReport& r) {
  const auto& pts = r.points;
  if (pts.empty()) return;
  const double t0 = pts.front().t;
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    ClassTrend tr;
    tr.cls = r.classes[c];
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto& p = pts[k];
      if (k > 0 && p.r_h[c] > pts[k - 1].r_h[c] * (1.0 + r.tolerances.wiggle)) {
        tr.r_h_nonincreasing = false;
      }
      const double lf = p.spectrum_flat.entries[c].length;
      const double lh = p.spectrum_h.entries[c].length;
      const double lt = p.spectrum_h_tilde.entries[c].length;
      if (lf > lh * (1 + 1e-6) || lh > lt * (1 + 1e-6)) tr.sandwich = false;
      const double eps = p.verification.allowance.value();
      if (p.verification.max_f_sum <= 2.0 + eps) {
        const double ratio = p.r_g[c] / p.r_h[c];
        if (ratio < std::sqrt(32.0) * (1 - r.tolerances.ratio_band) ||
            ratio > 8.0 * (1 + r.tolerances.ratio_band)) {
          tr.ratio_band = false;
        }
      }
      if (p.r_h[c] > 1.0) {
        lx.push_back(std::log(p.t));
        ly.push_back(std::log(p.r_h[c] - 1.0));
      }
      const double flat_dev = std::abs(lf / std::pow(p.t / t0, 0.25) /
                                           pts.front().spectrum_flat.entries[c].length -
                                       1.0);
      r.flat_length_scaling_error = std::max(r.flat_length_scaling_error, flat_dev);
    }
    tr.final_r_h = pts.back().r_h[c];
    tr.final_r_g_over_8 = pts.back().r_g[c] / 8.0;
    tr.rate = fit_slope(lx, ly);
    r.trends.push_back(tr);
  }
  for (const auto& p : pts) {
    const double dev = std::abs(p.area_flat / std::sqrt(p.t / t0) / pts.front().area_flat - 1.0);
    r.flat_area_scaling_error = std::max(r.flat_area_scaling_error, dev);
  }
}

}  // namespace detail

inline RayStudyReport run_ray(const RaySpec& spec) {
  spec.validate();
  RayStudyReport r;
  r.t_values = spec.t_values;
  r.scaling = spec.scaling;
  r.tolerances = spec.tolerances;
  r.classes = spec.classes;
  if (spec.screen_zeros) {
    auto screened = screen_classes(quartic(spec.base), spec.classes, spec.geodesic);
    r.classes = screened.kept;
    r.screened_out = screened.dropped;
    r.screening_rule = screened.rule;
    if (r.classes.empty()) {
      r.failure_index = 0;
      r.failure_message = "every class was screened out near zeros of q";
      return r;
    }
  }

  std::vector<HiggsData> path, fiber_path;
  for (double t : spec.t_values) {
    path.push_back(ray_data(spec.base, t, spec.scaling));
    fiber_path.push_back(hitchin_fiber_rep(quartic(path.back())));
  }
  const auto sols = continuation_solve(path, spec.solver);
  const auto fibers = continuation_solve(fiber_path, spec.solver);
  const auto allowance = calibrate_allowance(spec.base.grid(), spec.solver);

  const std::size_t solved = std::min(sols.solutions.size(), fibers.solutions.size());
  for (std::size_t k = 0; k < solved; ++k) {
    const auto& sol = sols.solutions[k];
    const auto& fsol = fibers.solutions[k];
    RayPoint p;
    p.t = spec.t_values[k];
    const auto q = quartic(sol.data);
    const auto h = metric_h(sol);
    const auto g = metric_g(sol);
    const auto flat = metric_flat(q);
    const FiberMetrics fm{fsol, detail::build_h(fsol, MetricKind::hitchin_fiber_h_tilde),
                          detail::build_g(fsol, MetricKind::minimal_surface_fiber_g_tilde)};
    p.area_h = area(h);
    p.area_g = area(g);
    p.area_flat = area(flat);
    p.area_h_tilde = area(fm.h_tilde);
    p.a = p.area_h / p.area_flat;
    p.newton_steps = sol.newton_steps;
    p.residual = sol.residual_norm;
    p.spectrum_h = spectrum(h, r.classes, spec.geodesic);
    p.spectrum_g = spectrum(g, r.classes, spec.geodesic);
    p.spectrum_flat = spectrum(flat, r.classes, spec.geodesic);
    p.spectrum_h_tilde = spectrum(fm.h_tilde, r.classes, spec.geodesic);
    for (const auto* t : {&p.spectrum_h, &p.spectrum_g, &p.spectrum_flat, &p.spectrum_h_tilde}) {
      if (!t->complete()) {
        r.failure_index = k;
        r.failure_message = "geodesic failure at t=" + std::to_string(p.t) + ": " + t->failure_message;
        detail::fill_trends(r);
        return r;
      }
    }
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
      const double lf = p.spectrum_flat.entries[c].length;
      p.r_h.push_back(p.spectrum_h.entries[c].length / lf);
      p.r_g.push_back(p.spectrum_g.entries[c].length / lf);
    }
    p.verification = verify(sol, fm, allowance);
    r.checks_passed = r.checks_passed && p.verification.passed();
    r.points.push_back(std::move(p));
  }
  if (!sols.complete() || !fibers.complete()) {
    r.failure_index = solved;
    r.failure_message = !sols.complete() ? sols.failure_message : fibers.failure_message;
  }
  detail::fill_trends(r);
  return r;
}

struct AreaTrend {
  std::vector<double> t;
  std::vector<double> a;
  double lower_bound = 0.0;   ///< 1 - eps_disc
  double upper_bound = 1.5;
  bool lower_ok = true;       ///< asserted
  bool upper_ok = true;       ///< reported
  bool nonincreasing = true;  ///< within the wiggle tolerance
  bool final_ok = false;      ///< a(t_max) <= 1 + final tolerance
  std::string verdict;
};

inline AreaTrend area_ratio_trend(const RayStudyReport& report) {
  if (report.points.empty()) throw InvalidArgument("area trend: report has no points");
  AreaTrend tr;
  const double eps = report.points.front().verification.allowance.value();
  tr.lower_bound = 1.0 - eps;
  for (std::size_t k = 0; k < report.points.size(); ++k) {
    const auto& p = report.points[k];
    tr.t.push_back(p.t);
    tr.a.push_back(p.a);
    if (p.a < tr.lower_bound) tr.lower_ok = false;
    if (p.a > tr.upper_bound + eps) tr.upper_ok = false;
    if (k > 0 && p.a > tr.a[k - 1] * (1.0 + report.tolerances.wiggle)) tr.nonincreasing = false;
  }
  tr.final_ok = tr.a.back() <= 1.0 + report.tolerances.final_ratio;
  tr.verdict = std::string(tr.lower_ok ? "a >= 1" : "a < 1 somewhere") + "; " +
               (tr.nonincreasing ? "nonincreasing" : "not monotone") + "; a(t_max) = " +
               std::to_string(tr.a.back()) + (tr.final_ok ? " within" : " outside") +
               " tolerance of 1";
  return tr;
}

struct GaugeRayPoint {
  double t = 0.0;
  double h_difference = 0.0;  ///< sup |h(μ0, tν0) - h(√t μ0, √t ν0)|
};

struct GaugeRayReport {
  std::vector<GaugeRayPoint> points;
  double tolerance = 0.0;
  bool passed() const {
    return std::all_of(points.begin(), points.end(),
                       [&](const GaugeRayPoint& p) { return p.h_difference <= tolerance; });
  }
};

/// h_t computed along (μ0, t ν0) and along (√t μ0, √t ν0), which lie in one
/// C*-orbit.
inline GaugeRayReport gauge_ray_consistency(const RaySpec& spec) {
  spec.validate();
  std::vector<HiggsData> a, b;
  for (double t : spec.t_values) {
    a.push_back(ray_data(spec.base, t, RayScaling::nu));
    b.push_back(ray_data(spec.base, t, RayScaling::symmetric));
  }
  const auto sa = continuation_solve(a, spec.solver);
  const auto sb = continuation_solve(b, spec.solver);
  if (!sa.complete()) throw std::runtime_error("gauge ray, nu scaling: " + sa.failure_message);
  if (!sb.complete()) throw std::runtime_error("gauge ray, symmetric scaling: " + sb.failure_message);
  GaugeRayReport r;
  r.tolerance = 10.0 * spec.solver.tolerance;
  for (std::size_t k = 0; k < spec.t_values.size(); ++k) {
    r.points.push_back({spec.t_values[k], sup_distance(metric_h(sa.solutions[k]).factor,
                                                       metric_h(sb.solutions[k]).factor)});
  }
  return r;
}

}  // namespace gothen

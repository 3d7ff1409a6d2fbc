#pragma once

// Conformal metrics factor * |dz|^2 induced by a solution of the Hitchin
// system, by the Hitchin-fiber solution over the same quartic differential,
// and by the quartic differential itself.

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>

#include "gothen/grid.hpp"
#include "gothen/higgs.hpp"
#include "gothen/solver.hpp"

namespace gothen {

enum class MetricKind {
  maximal_surface_h,
  hitchin_fiber_h_tilde,
  minimal_surface_g,
  minimal_surface_fiber_g_tilde,
  flat_q,
  custom,
};

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::maximal_surface_h: return "h";
    case MetricKind::hitchin_fiber_h_tilde: return "h_tilde";
    case MetricKind::minimal_surface_g: return "g";
    case MetricKind::minimal_surface_fiber_g_tilde: return "g_tilde";
    case MetricKind::flat_q: return "flat";
    case MetricKind::custom: return "custom";
  }
  return "custom";
}

inline MetricKind parse_metric_kind(std::string_view s) {
  for (auto k : {MetricKind::maximal_surface_h, MetricKind::hitchin_fiber_h_tilde,
                 MetricKind::minimal_surface_g, MetricKind::minimal_surface_fiber_g_tilde,
                 MetricKind::flat_q, MetricKind::custom}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown metric kind '" + std::string(s) + "'");
}

struct ConformalMetric {
  RealField factor;
  MetricKind kind = MetricKind::custom;
  std::string provenance;

  const GridSpec& grid() const noexcept { return factor.grid(); }

  /// c * factor; tagged custom unless c == 1.
  ConformalMetric scaled(double c) const {
    return {factor * c, c == 1.0 ? kind : MetricKind::custom,
            std::to_string(c) + "*" + std::string(to_string(kind))};
  }
};

inline std::string hash_label(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline ConformalMetric build_h(const SolutionPair& sol, MetricKind kind) {
  return {zip(sol.psi1, sol.psi2, [](double a, double b) { return std::exp(a - b); }), kind,
          "solution:" + hash_label(sol.data.provenance_hash())};
}

inline ConformalMetric build_g(const SolutionPair& sol, MetricKind kind) {
  const auto mu_sq = sol.data.mu_modulus_squared();
  const auto nu_sq = sol.data.nu_modulus_squared();
  RealField factor(sol.grid());
  for (std::size_t k = 0; k < factor.size(); ++k) {
    const double p1 = sol.psi1[k], p2 = sol.psi2[k];
    factor[k] = 16.0 * (nu_sq[k] * std::exp(-2.0 * p1) + 2.0 * std::exp(p1 - p2) +
                        mu_sq[k] * std::exp(2.0 * p2));
  }
  return {std::move(factor), kind, "solution:" + hash_label(sol.data.provenance_hash())};
}

}  // namespace detail

/// h = e^{ψ1-ψ2} |dz|^2, the maximal-surface metric.
inline ConformalMetric metric_h(const SolutionPair& sol) {
  return detail::build_h(sol, MetricKind::maximal_surface_h);
}

/// g = 16(|ν|^2 e^{-2ψ1} + 2 e^{ψ1-ψ2} + |μ|^2 e^{2ψ2}) |dz|^2, the
/// minimal-surface metric. Equals 16 h (2 + f1 + f2).
inline ConformalMetric metric_g(const SolutionPair& sol) {
  return detail::build_g(sol, MetricKind::minimal_surface_g);
}

/// |q|^{1/2} |dz|^2. Zeros of q stay exact zeros of the factor.
inline ConformalMetric metric_flat(const QuarticDifferential& q) {
  if (q.vanishes_identically()) throw InvalidArgument("flat metric of q ≡ 0 is degenerate");
  return {map(q.field(), [](Complex z) { return std::sqrt(std::abs(z)); }), MetricKind::flat_q,
          "quartic"};
}

struct FiberMetrics {
  SolutionPair solution;  ///< solution for the pair (1, q)
  ConformalMetric h_tilde;
  ConformalMetric g_tilde;
};

/// Solves the system for (1, q) and builds h̃ and g̃ from it.
inline FiberMetrics fiber_metrics(const QuarticDifferential& q, const SolverOptions& opts = {}) {
  auto sol = solve(hitchin_fiber_rep(q), opts);
  auto h = detail::build_h(sol, MetricKind::hitchin_fiber_h_tilde);
  auto g = detail::build_g(sol, MetricKind::minimal_surface_fiber_g_tilde);
  return {std::move(sol), std::move(h), std::move(g)};
}

/// Area = ∫ factor over the unit torus.
inline double area(const ConformalMetric& m) { return integrate(m.factor); }

}  // namespace gothen

#pragma once

// Damped Newton solver for the Gothen Hitchin system on the torus:
//
//   Δψ1 = e^{ψ1-ψ2} - |ν|^2 e^{-2ψ1}
//   Δψ2 = |μ|^2 e^{2ψ2} - e^{ψ1-ψ2}
//
// The system is the Euler-Lagrange equation of the convex energy
// ∫ |∇ψ|^2/2 + e^{ψ1-ψ2} + |ν|^2 e^{-2ψ1}/2 + |μ|^2 e^{2ψ2}/2, so the negated
// Newton Jacobian is symmetric positive definite and each linearized step is
// solved with preconditioned conjugate gradients.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gothen/grid.hpp"
#include "gothen/higgs.hpp"
#include "gothen/spectral.hpp"

namespace gothen {

struct PsiPair {
  RealField psi1;
  RealField psi2;
};

struct SolverOptions {
  double tolerance = 1e-9;  ///< sup-norm residual target
  int max_newton_steps = 50;
  double damping_floor = 0x1p-20;
  int max_krylov_iterations = 2000;
  LaplacianMethod laplacian = LaplacianMethod::spectral;
  std::optional<PsiPair> warm_start;
};

struct SolutionPair {
  RealField psi1;
  RealField psi2;
  HiggsData data;
  double residual_norm = 0.0;
  double tolerance = 0.0;
  LaplacianMethod laplacian = LaplacianMethod::spectral;
  int newton_steps = 0;
  int krylov_iterations = 0;

  const GridSpec& grid() const noexcept { return psi1.grid(); }
};

class SolverFailure : public std::runtime_error {
public:
  SolverFailure(const std::string& what, double residual, PsiPair iterate, int steps)
      : std::runtime_error(what + " (residual sup-norm " + std::to_string(residual) + " after " +
                           std::to_string(steps) + " Newton steps)"),
        residual_norm(residual),
        last_iterate(std::move(iterate)),
        newton_steps(steps) {}

  double residual_norm;
  PsiPair last_iterate;
  int newton_steps;
};

/// Constant solution for constant data |μ|^2 = mu_sq, |ν|^2 = nu_sq. Zeroing
/// both rows with Δ = 0 gives 3ψ1 - ψ2 = ln|ν|^2 and ψ1 - 3ψ2 = ln|μ|^2.
struct ConstantSolution {
  double psi1;
  double psi2;
};

inline ConstantSolution constant_solution(double mu_sq, double nu_sq) {
  const double lm = std::log(mu_sq);
  const double ln = std::log(nu_sq);
  return {(3.0 * ln - lm) / 8.0, (ln - 3.0 * lm) / 8.0};
}

/// Closed form from the mean values of |μ|^2 and |ν|^2; exact for constant data.
inline ConstantSolution mean_field_solution(const HiggsData& data) {
  return constant_solution(integrate(data.mu_modulus_squared()),
                           integrate(data.nu_modulus_squared()));
}

struct Residual {
  RealField r1;
  RealField r2;
  double sup_norm() const { return std::max(gothen::sup_norm(r1), gothen::sup_norm(r2)); }
};

namespace detail {

struct Coefficients {
  RealField e;    // e^{ψ1-ψ2}
  RealField nu2;  // |ν|^2 e^{-2ψ1}
  RealField mu2;  // |μ|^2 e^{2ψ2}
};

inline Coefficients coefficients(const RealField& mu_sq, const RealField& nu_sq,
                                 const RealField& psi1, const RealField& psi2) {
  Coefficients c{RealField(psi1.grid()), RealField(psi1.grid()), RealField(psi1.grid())};
  for (std::size_t k = 0; k < psi1.size(); ++k) {
    c.e[k] = std::exp(psi1[k] - psi2[k]);
    c.nu2[k] = nu_sq[k] * std::exp(-2.0 * psi1[k]);
    c.mu2[k] = mu_sq[k] * std::exp(2.0 * psi2[k]);
  }
  return c;
}

inline Residual residual_from(const RealField& mu_sq, const RealField& nu_sq,
                              const RealField& psi1, const RealField& psi2,
                              LaplacianMethod method) {
  const auto c = coefficients(mu_sq, nu_sq, psi1, psi2);
  Residual r{laplacian(psi1, method), laplacian(psi2, method)};
  for (std::size_t k = 0; k < psi1.size(); ++k) {
    r.r1[k] += -c.e[k] + c.nu2[k];
    r.r2[k] += -c.mu2[k] + c.e[k];
  }
  return r;
}

inline double dot(const RealField& a1, const RealField& a2, const RealField& b1,
                  const RealField& b2) {
  double s = 0.0;
  for (std::size_t k = 0; k < a1.size(); ++k) s += a1[k] * b1[k] + a2[k] * b2[k];
  return s;
}

// Preconditioned CG for (H - L) δ = rhs, H = [[a, -e], [-e, d]] pointwise.
// Returns the iteration count.
inline int pcg_newton_step(const Coefficients& c, LaplacianMethod method, const Residual& rhs,
                           double rel_tol, int max_iter, RealField& d1, RealField& d2) {
  const GridSpec grid = rhs.r1.grid();
  RealField a(grid), d(grid);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = c.e[k] + 2.0 * c.nu2[k];
    d[k] = 2.0 * c.mu2[k] + c.e[k];
  }
  const double shift = 0.5 * (integrate(a) + integrate(d));

  auto apply = [&](const RealField& v1, const RealField& v2, RealField& o1, RealField& o2) {
    o1 = laplacian(v1, method);
    o2 = laplacian(v2, method);
    for (std::size_t k = 0; k < v1.size(); ++k) {
      o1[k] = -o1[k] + a[k] * v1[k] - c.e[k] * v2[k];
      o2[k] = -o2[k] + d[k] * v2[k] - c.e[k] * v1[k];
    }
  };
  // (-L + shift)^{-1} = -(L - shift)^{-1}
  auto precondition = [&](const RealField& r1, const RealField& r2, RealField& z1,
                          RealField& z2) {
    z1 = shifted_poisson_solve(r1, shift, method) * -1.0;
    z2 = shifted_poisson_solve(r2, shift, method) * -1.0;
  };

  d1 = RealField(grid);
  d2 = RealField(grid);
  RealField r1 = rhs.r1, r2 = rhs.r2;
  RealField z1(grid), z2(grid), p1(grid), p2(grid), q1(grid), q2(grid);
  const double b_norm = std::sqrt(dot(r1, r2, r1, r2));
  if (b_norm == 0.0) return 0;
  precondition(r1, r2, z1, z2);
  p1 = z1;
  p2 = z2;
  double rz = dot(r1, r2, z1, z2);
  int it = 0;
  while (it < max_iter) {
    apply(p1, p2, q1, q2);
    const double alpha = rz / dot(p1, p2, q1, q2);
    for (std::size_t k = 0; k < d1.size(); ++k) {
      d1[k] += alpha * p1[k];
      d2[k] += alpha * p2[k];
      r1[k] -= alpha * q1[k];
      r2[k] -= alpha * q2[k];
    }
    ++it;
    if (std::sqrt(dot(r1, r2, r1, r2)) <= rel_tol * b_norm) break;
    precondition(r1, r2, z1, z2);
    const double rz_next = dot(r1, r2, z1, z2);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < d1.size(); ++k) {
      p1[k] = z1[k] + beta * p1[k];
      p2[k] = z2[k] + beta * p2[k];
    }
  }
  return it;
}

}  // namespace detail

/// Pointwise residuals R1 = Δψ1 - e^{ψ1-ψ2} + |ν|^2 e^{-2ψ1} and
/// R2 = Δψ2 - |μ|^2 e^{2ψ2} + e^{ψ1-ψ2}.
inline Residual residual(const HiggsData& data, const RealField& psi1, const RealField& psi2,
                         LaplacianMethod method = LaplacianMethod::spectral) {
  if (!(psi1.grid() == data.grid()) || !(psi2.grid() == data.grid())) {
    throw InvalidArgument("residual: fields and data must share one grid");
  }
  return detail::residual_from(data.mu_modulus_squared(), data.nu_modulus_squared(), psi1, psi2,
                               method);
}

/// Smallest relative excess of the linearization's diagonal entries over the
/// off-diagonal magnitude e^{ψ1-ψ2}, taken over points where |μ| and |ν| both
/// exceed `zero_tol`. Positive means strict diagonal dominance.
inline double jacobian_dominance_margin(const HiggsData& data, const RealField& psi1,
                                        const RealField& psi2, double zero_tol = 1e-12) {
  const auto mu_sq = data.mu_modulus_squared();
  const auto nu_sq = data.nu_modulus_squared();
  const auto c = detail::coefficients(mu_sq, nu_sq, psi1, psi2);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < psi1.size(); ++k) {
    if (mu_sq[k] <= zero_tol * zero_tol || nu_sq[k] <= zero_tol * zero_tol) continue;
    const double off = c.e[k];
    margin = std::min(margin, (c.e[k] + 2.0 * c.nu2[k] - off) / off);
    margin = std::min(margin, (2.0 * c.mu2[k] + c.e[k] - off) / off);
  }
  return margin;
}

inline SolutionPair solve(const HiggsData& data, const SolverOptions& opts = {}) {
  if (!(opts.tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const GridSpec grid = data.grid();
  const auto mu_sq = data.mu_modulus_squared();
  const auto nu_sq = data.nu_modulus_squared();

  RealField psi1(grid), psi2(grid);
  if (opts.warm_start) {
    if (!(opts.warm_start->psi1.grid() == grid)) {
      throw InvalidArgument("warm start lives on a different grid");
    }
    psi1 = opts.warm_start->psi1;
    psi2 = opts.warm_start->psi2;
  } else {
    const auto c0 = mean_field_solution(data);
    psi1 = RealField(grid, c0.psi1);
    psi2 = RealField(grid, c0.psi2);
  }

  Residual r = detail::residual_from(mu_sq, nu_sq, psi1, psi2, opts.laplacian);
  double r_norm = r.sup_norm();
  int steps = 0;
  int krylov = 0;
  while (!(r_norm <= opts.tolerance)) {
    if (!std::isfinite(r_norm)) {
      throw SolverFailure("non-finite residual", r_norm, {psi1, psi2}, steps);
    }
    if (steps >= opts.max_newton_steps) {
      throw SolverFailure("Newton iteration did not converge", r_norm, {psi1, psi2}, steps);
    }
    const auto c = detail::coefficients(mu_sq, nu_sq, psi1, psi2);
    const double forcing = std::clamp(0.1 * r_norm, 1e-13, 1e-3);
    RealField d1(grid), d2(grid);
    krylov += detail::pcg_newton_step(c, opts.laplacian, r, forcing, opts.max_krylov_iterations,
                                      d1, d2);

    bool accepted = false;
    for (double step = 1.0; step >= opts.damping_floor; step *= 0.5) {
      RealField t1 = psi1, t2 = psi2;
      for (std::size_t k = 0; k < t1.size(); ++k) {
        t1[k] += step * d1[k];
        t2[k] += step * d2[k];
      }
      Residual rt = detail::residual_from(mu_sq, nu_sq, t1, t2, opts.laplacian);
      const double rt_norm = rt.sup_norm();
      if (rt_norm < r_norm) {
        psi1 = std::move(t1);
        psi2 = std::move(t2);
        r = std::move(rt);
        r_norm = rt_norm;
        accepted = true;
        break;
      }
    }
    ++steps;
    if (!accepted) {
      throw SolverFailure("line search fell below the damping floor", r_norm, {psi1, psi2},
                          steps);
    }
  }
  return SolutionPair{std::move(psi1), std::move(psi2), data,         r_norm,
                      opts.tolerance,  opts.laplacian,  steps,        krylov};
}

struct ContinuationResult {
  std::vector<SolutionPair> solutions;
  std::optional<std::size_t> failure_index;
  std::string failure_message;

  bool complete() const noexcept { return !failure_index.has_value(); }
  int total_newton_steps() const {
    int s = 0;
    for (const auto& sol : solutions) s += sol.newton_steps;
    return s;
  }
};

/// Solves a path of data sets in order. With warm starts, element k starts
/// from solution k-1 shifted by the change in the mean-field constant
/// solution, which is exact along rays of constant data.
inline ContinuationResult continuation_solve(std::span<const HiggsData> path,
                                             const SolverOptions& opts, bool warm = true) {
  ContinuationResult out;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k > 0 && !(path[k].grid() == path[0].grid())) {
      throw InvalidArgument("continuation path mixes grids");
    }
    SolverOptions step_opts = opts;
    if (warm && k > 0) {
      const auto& prev = out.solutions.back();
      const auto c_prev = mean_field_solution(path[k - 1]);
      const auto c_next = mean_field_solution(path[k]);
      step_opts.warm_start =
          PsiPair{prev.psi1 + (c_next.psi1 - c_prev.psi1), prev.psi2 + (c_next.psi2 - c_prev.psi2)};
    }
    try {
      out.solutions.push_back(solve(path[k], step_opts));
    } catch (const SolverFailure& e) {
      out.failure_index = k;
      out.failure_message = e.what();
      break;
    }
  }
  return out;
}

}  // namespace gothen

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gothen/solver.hpp"

using namespace gothen;

namespace {

HiggsData cosine_nu(GridSpec g, double amplitude, double t = 1.0) {
  const std::vector<FourierTerm> mu{{{0, 0}, 1.0}};
  const std::vector<FourierTerm> nu{
      {{0, 0}, t}, {{1, 0}, t * amplitude / 2}, {{-1, 0}, t * amplitude / 2}};
  return HiggsData::from_coefficients(mu, nu, g);
}

HiggsData checker_data(GridSpec g) {
  // mu = 1 + 0.3 sin(2 pi y), nu = 1 + 0.5 cos(2 pi x) cos(2 pi y)
  const std::vector<FourierTerm> mu{
      {{0, 0}, 1.0}, {{0, 1}, Complex(0, -0.15)}, {{0, -1}, Complex(0, 0.15)}};
  const std::vector<FourierTerm> nu{{{0, 0}, 1.0},
                                    {{1, 1}, 0.125},
                                    {{1, -1}, 0.125},
                                    {{-1, 1}, 0.125},
                                    {{-1, -1}, 0.125}};
  return HiggsData::from_coefficients(mu, nu, g);
}

}  // namespace

TEST(ConstantSolution, SolvesTheLinearSystemBySubstitution) {
  for (auto [m, n] : {std::pair{1.0, 1.0}, {1.0, std::exp(4.0)}, {2.0, 3.0}, {0.1, 7.0}}) {
    const auto c = constant_solution(m * m, n * n);
    // 3 psi1 - psi2 = 2 ln n and psi1 - 3 psi2 = 2 ln m
    EXPECT_NEAR(3 * c.psi1 - c.psi2, 2 * std::log(n), 1e-14);
    EXPECT_NEAR(c.psi1 - 3 * c.psi2, 2 * std::log(m), 1e-14);
    // Both rows of the system vanish with Delta = 0.
    EXPECT_NEAR(std::exp(c.psi1 - c.psi2) - n * n * std::exp(-2 * c.psi1), 0.0, 1e-13);
    EXPECT_NEAR(m * m * std::exp(2 * c.psi2) - std::exp(c.psi1 - c.psi2), 0.0, 1e-13);
  }
  const auto e4 = constant_solution(1.0, std::exp(8.0));
  EXPECT_NEAR(e4.psi1, 3.0, 1e-14);
  EXPECT_NEAR(e4.psi2, 1.0, 1e-14);
}

TEST(Residual, VanishesAtConstantSolutions) {
  GridSpec g(32);
  auto unit = residual(HiggsData::constant(g, 1.0, 1.0), RealField(g), RealField(g));
  EXPECT_LE(unit.sup_norm(), 1e-15);

  for (auto [m, n] : {std::pair{2.0, 3.0}, {1.0, std::exp(4.0)}}) {
    const double psi1 = (3 * std::log(n) - std::log(m)) / 4;
    const double psi2 = (std::log(n) - 3 * std::log(m)) / 4;
    auto r = residual(HiggsData::constant(g, m, n), RealField(g, psi1), RealField(g, psi2));
    EXPECT_LE(r.sup_norm(), 1e-12) << m << "," << n;
  }
  auto r31 = residual(HiggsData::constant(g, 1.0, std::exp(4.0)), RealField(g, 3.0),
                      RealField(g, 1.0));
  EXPECT_LE(r31.sup_norm(), 1e-12);
}

TEST(Residual, RejectsMismatchedGrids) {
  GridSpec g(32);
  EXPECT_THROW(residual(HiggsData::constant(g, 1.0, 1.0), RealField(GridSpec(16)), RealField(g)),
               InvalidArgument);
}

TEST(Solve, UnitDataGivesZeroSolution) {
  GridSpec g(64);
  auto sol = solve(HiggsData::constant(g, 1.0, 1.0));
  EXPECT_LE(sol.residual_norm, 1e-9);
  EXPECT_LE(sup_norm(sol.psi1), 1e-12);
  EXPECT_LE(sup_norm(sol.psi2), 1e-12);
}

TEST(Solve, SmoothDataConvergesAndMatchesMeanFieldToZerothOrder) {
  GridSpec g(128);
  auto data = cosine_nu(g, 0.5);
  auto sol = solve(data);
  EXPECT_LE(residual(data, sol.psi1, sol.psi2).sup_norm(), 1e-9);
  EXPECT_TRUE(all_finite(sol.psi1));
  // Constant-data prediction built from the means of |mu|^2 and |nu|^2 (1.125).
  const auto pred = constant_solution(1.0, 1.125);
  EXPECT_NEAR(integrate(sol.psi1), pred.psi1, 1e-2);
  EXPECT_NEAR(integrate(sol.psi2), pred.psi2, 1e-2);

  // Cross-validation at half resolution.
  auto coarse = solve(cosine_nu(GridSpec(64), 0.5));
  EXPECT_LE(sup_distance(restrict_field(sol.psi1, GridSpec(64)), coarse.psi1), 1e-9);
  EXPECT_LE(sup_distance(restrict_field(sol.psi2, GridSpec(64)), coarse.psi2), 1e-9);
}

TEST(Solve, GaugeActionShiftsPsiByLogModulus) {
  GridSpec g(64);
  auto data = checker_data(g);
  auto base = solve(data);
  for (Complex lambda : {Complex(2.0, 0.0), Complex(0.0, 1.0), std::polar(1e3, std::numbers::pi / 7)}) {
    auto acted = solve(gauge_act(data, lambda));
    const double shift = std::log(std::abs(lambda));
    EXPECT_LE(sup_distance(acted.psi1, base.psi1 + (-shift)), 10 * 1e-9) << lambda;
    EXPECT_LE(sup_distance(acted.psi2, base.psi2 + (-shift)), 10 * 1e-9) << lambda;
  }
}

TEST(Solve, HandlesDataWithZeros) {
  GridSpec g(64);
  const std::vector<FourierTerm> one{{{0, 0}, 1.0}};
  const std::vector<FourierTerm> cos2{{{1, 0}, 1.0}, {{-1, 0}, 1.0}};
  auto sol = solve(HiggsData::from_coefficients(one, cos2, g));
  EXPECT_LE(sol.residual_norm, 1e-9);
  const std::vector<FourierTerm> sin2{{{1, 0}, Complex(0, -1)}, {{-1, 0}, Complex(0, 1)}};
  auto both = solve(HiggsData::from_coefficients(cos2, sin2, g));
  EXPECT_LE(both.residual_norm, 1e-9);
}

TEST(Solve, Fd5LaplacianConvergesToFd5Residual) {
  GridSpec g(64);
  auto data = checker_data(g);
  SolverOptions opts;
  opts.laplacian = LaplacianMethod::fd5;
  auto sol = solve(data, opts);
  EXPECT_LE(residual(data, sol.psi1, sol.psi2, LaplacianMethod::fd5).sup_norm(), 1e-9);
  // The fd5 solution differs from the spectral one at O(N^-2).
  auto spectral = solve(data);
  const double diff = sup_distance(sol.psi1, spectral.psi1);
  EXPECT_GT(diff, 1e-7);
  EXPECT_LT(diff, 1e-2);
}

TEST(Solve, GridConvergenceIsFasterThanSecondOrder) {
  std::vector<RealField> sols;
  for (int n : {16, 32, 64}) sols.push_back(solve(checker_data(GridSpec(n))).psi1);
  auto fine = solve(checker_data(GridSpec(128))).psi1;
  const double d16 = sup_distance(restrict_field(fine, GridSpec(16)), sols[0]);
  const double d32 = sup_distance(restrict_field(fine, GridSpec(32)), sols[1]);
  EXPECT_LT(d32, d16 / 4.0);
  EXPECT_LE(sup_distance(restrict_field(fine, GridSpec(64)), sols[2]), 1e-9);
}

TEST(Solve, IsBitwiseDeterministic) {
  GridSpec g(64);
  auto data = checker_data(g);
  auto a = solve(data);
  auto b = solve(data);
  EXPECT_EQ(a.psi1, b.psi1);
  EXPECT_EQ(a.psi2, b.psi2);
  EXPECT_EQ(a.residual_norm, b.residual_norm);
}

TEST(Solve, ReportsFailureWithIterate) {
  GridSpec g(32);
  SolverOptions opts;
  opts.max_newton_steps = 0;
  try {
    solve(checker_data(g), opts);
    FAIL() << "expected SolverFailure";
  } catch (const SolverFailure& e) {
    EXPECT_GT(e.residual_norm, 1e-9);
    EXPECT_EQ(e.newton_steps, 0);
    EXPECT_EQ(e.last_iterate.psi1.n(), 32);
  }
  SolverOptions bad;
  bad.tolerance = 0.0;
  EXPECT_THROW(solve(checker_data(g), bad), InvalidArgument);
}

TEST(Solve, JacobianIsStrictlyDiagonallyDominantOnIterates) {
  GridSpec g(64);
  auto data = checker_data(g);
  const auto c0 = mean_field_solution(data);
  EXPECT_GT(jacobian_dominance_margin(data, RealField(g, c0.psi1), RealField(g, c0.psi2)), 0.0);
  auto sol = solve(data);
  EXPECT_GT(jacobian_dominance_margin(data, sol.psi1, sol.psi2), 0.0);
}

TEST(ContinuationSolve, SingleElementMatchesSolve) {
  GridSpec g(32);
  const std::vector<HiggsData> path{checker_data(g)};
  auto res = continuation_solve(path, {});
  ASSERT_TRUE(res.complete());
  auto direct = solve(path[0]);
  EXPECT_EQ(res.solutions[0].psi1, direct.psi1);
}

TEST(ContinuationSolve, ConstantRayFollowsClosedForm) {
  GridSpec g(32);
  std::vector<HiggsData> path;
  for (double t : {1.0, 2.0, 4.0}) path.push_back(HiggsData::constant(g, 1.0, t));
  auto res = continuation_solve(path, {});
  ASSERT_TRUE(res.complete());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double t = std::pow(2.0, static_cast<double>(k));
    const auto c = constant_solution(1.0, t * t);
    EXPECT_LE(sup_distance(res.solutions[k].psi1, RealField(g, c.psi1)), 1e-10);
    EXPECT_LE(sup_distance(res.solutions[k].psi2, RealField(g, c.psi2)), 1e-10);
  }
}

TEST(ContinuationSolve, WarmStartsSaveNewtonSteps) {
  GridSpec g(128);
  std::vector<HiggsData> path;
  for (int k = 0; k <= 8; ++k) path.push_back(cosine_nu(g, 0.9, std::ldexp(1.0, k)));
  auto warm = continuation_solve(path, {}, true);
  auto cold = continuation_solve(path, {}, false);
  ASSERT_TRUE(warm.complete()) << warm.failure_message;
  ASSERT_TRUE(cold.complete()) << cold.failure_message;
  EXPECT_LT(warm.total_newton_steps(), cold.total_newton_steps());
  for (std::size_t k = 0; k < path.size(); ++k) {
    EXPECT_LE(sup_distance(warm.solutions[k].psi1, cold.solutions[k].psi1), 1e-8);
  }
}

TEST(ContinuationSolve, ReportsFailureIndexWithPartialResults) {
  GridSpec g(32);
  std::vector<HiggsData> path{HiggsData::constant(g, 1.0, 1.0), checker_data(g)};
  SolverOptions opts;
  opts.max_newton_steps = 1;
  auto res = continuation_solve(path, opts);
  ASSERT_FALSE(res.complete());
  EXPECT_EQ(*res.failure_index, 1u);
  EXPECT_EQ(res.solutions.size(), 1u);
}

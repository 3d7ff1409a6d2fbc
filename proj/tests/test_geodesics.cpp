#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gothen/geodesics.hpp"
#include "gothen/verification.hpp"

using namespace gothen;

namespace {

double bump(double x, double y) {
  const double dx = x - 0.5, dy = y - 0.5;
  return std::exp(-8.0 * (dx * dx + dy * dy)) + 0.1;
}

ConformalMetric bump_metric(int n) {
  return {RealField::sample(GridSpec(n), bump), MetricKind::custom, "bump"};
}

ConformalMetric constant_metric(int n, double factor) {
  return {RealField(GridSpec(n), factor), MetricKind::custom, "constant"};
}

HiggsData smooth_data(GridSpec g) {
  const std::vector<FourierTerm> mu{{{0, 0}, 1.0}, {{0, 1}, 0.2}};
  const std::vector<FourierTerm> nu{{{0, 0}, 1.0}, {{1, 0}, 0.25}, {{-1, 0}, 0.25}};
  return HiggsData::from_coefficients(mu, nu, g);
}

}  // namespace

TEST(HomotopyClass, CanonicalAndPrimitive) {
  EXPECT_EQ((HomotopyClass{-2, 1}.canonical()), (HomotopyClass{2, -1}));
  EXPECT_EQ((HomotopyClass{0, -3}.canonical()), (HomotopyClass{0, 3}));
  EXPECT_TRUE((HomotopyClass{2, 1}.primitive()));
  EXPECT_FALSE((HomotopyClass{2, 2}.primitive()));
  EXPECT_TRUE((HomotopyClass{0, 0}.is_zero()));
}

TEST(GeodesicLength, ConstantFactorGivesStraightLines) {
  for (double c : {1.0, 2.5}) {
    const double len = geodesic_length(constant_metric(64, c * c), {3, 4});
    EXPECT_NEAR(len / (5.0 * c), 1.0, 1e-8);
  }
  EXPECT_NEAR(geodesic_length(constant_metric(64, 1.0), {1, 0}), 1.0, 1e-12);
}

TEST(GeodesicLength, UnitSolutionGivesUnitLength) {
  GridSpec g(32);
  auto h = metric_h(solve(HiggsData::constant(g, 1.0, 1.0)));
  EXPECT_NEAR(geodesic_length(h, {1, 0}), 1.0, 1e-9);
}

TEST(GeodesicLength, BumpMatchesQuadratureAndFineGraphOracles) {
  // The shortest (1,0) curve runs along y = 0, farthest from the bump.
  double quad = 0.0;
  const int k = 200000;
  for (int i = 0; i < k; ++i) quad += std::sqrt(bump((i + 0.5) / k, 0.0)) / k;

  const int n = 64;
  const double len = geodesic_length(bump_metric(n), {1, 0});
  EXPECT_NEAR(len / quad, 1.0, 5e-3);

  GeodesicOptions graph_only;
  graph_only.refine = false;
  graph_only.basepoint_stride = 1;
  const double oracle = geodesic_length(bump_metric(4 * n), {1, 0}, graph_only);
  EXPECT_NEAR(len / oracle, 1.0, 5e-3);
}

TEST(GeodesicLength, RelaxationNeverExceedsGraphStage) {
  auto m = bump_metric(64);
  for (auto c : default_classes()) {
    auto r = geodesic_length_detailed(m, c);
    EXPECT_LE(r.length, r.stage1_length * (1 + 1e-15)) << c.label();
    EXPECT_GT(r.length, 0.0);
  }
}

TEST(GeodesicLength, DiagonalClassesImproveUnderRelaxation) {
  auto r = geodesic_length_detailed(bump_metric(64), {1, 1});
  EXPECT_TRUE(r.refined);
  EXPECT_LT(r.length, r.stage1_length * 0.999);
}

TEST(GeodesicLength, ScalingIsHomogeneous) {
  auto m = bump_metric(64);
  auto h = metric_h(solve(smooth_data(GridSpec(64))));
  for (auto base : {m, h}) {
    for (auto c : {HomotopyClass{1, 0}, HomotopyClass{2, 1}}) {
      const double l1 = geodesic_length(base, c);
      for (double t : {1e-8, 0.3, 7.3, 1e6}) {
        EXPECT_NEAR(geodesic_length(base.scaled(t), c) / (std::sqrt(t) * l1), 1.0, 1e-8)
            << c.label() << " t=" << t;
      }
    }
  }
}

TEST(GeodesicLength, MultipleClassesAreSubadditive) {
  auto m = bump_metric(64);
  for (auto c : {HomotopyClass{1, 0}, HomotopyClass{1, 1}}) {
    const double l1 = geodesic_length(m, c);
    const double l2 = geodesic_length(m, {2 * c.p, 2 * c.q});
    EXPECT_LE(l2, 2.0 * l1 * (1 + 1e-6)) << c.label();
  }
  auto flat = constant_metric(32, 4.0);
  EXPECT_NEAR(geodesic_length(flat, {2, 2}), 2.0 * geodesic_length(flat, {1, 1}), 1e-8);
}

TEST(GeodesicLength, GraphStageConvergesWithResolutionOnBump) {
  // Endpoint averaging of a convex profile is not monotone in N, so only
  // convergence of successive refinements is checked.
  GeodesicOptions graph_only;
  graph_only.refine = false;
  graph_only.basepoint_stride = 1;
  const double l32 = geodesic_length(bump_metric(32), {1, 0}, graph_only);
  const double l64 = geodesic_length(bump_metric(64), {1, 0}, graph_only);
  const double l128 = geodesic_length(bump_metric(128), {1, 0}, graph_only);
  EXPECT_NEAR(std::abs(l32 - l64) / std::abs(l64 - l128), 4.0, 0.2);
}

TEST(GeodesicLength, RejectsZeroClassAndZeroMetric) {
  EXPECT_THROW(geodesic_length(bump_metric(32), {0, 0}), InvalidArgument);
  EXPECT_THROW(geodesic_length(constant_metric(32, 0.0), {1, 0}), InvalidArgument);
}

TEST(GeodesicLength, HandlesConePoints) {
  // q = (1 + cos 2 pi x)(1 + cos 2 pi y) vanishes at the isolated point (1/2, 1/2).
  GridSpec g(64);
  const std::vector<FourierTerm> a{{{0, 0}, 1.0}, {{1, 0}, 0.5}, {{-1, 0}, 0.5}};
  const std::vector<FourierTerm> b{{{0, 0}, 1.0}, {{0, 1}, 0.5}, {{0, -1}, 0.5}};
  auto flat = metric_flat(quartic(HiggsData::from_coefficients(a, b, g)));
  EXPECT_LE(flat.factor(32, 32), 1e-7);
  for (auto c : default_classes()) {
    const double len = geodesic_length(flat, c);
    EXPECT_TRUE(std::isfinite(len));
    EXPECT_GT(len, 0.0) << c.label();
  }
}

TEST(FlatLength, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(flat_length_closed_form(1.0, {1, 0}), 1.0);
  EXPECT_NEAR(flat_length_closed_form(16.0, {1, 1}), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_THROW(flat_length_closed_form(0.0, {1, 0}), InvalidArgument);
}

TEST(FlatLength, VariationalRoutineMatchesClosedForm) {
  GridSpec g(64);
  for (Complex q : {Complex(1.0, 0.0), Complex(0.0, 16.0), Complex(-3.0, 4.0)}) {
    auto flat = metric_flat(QuarticDifferential(ComplexField(g, q), 0));
    for (auto c : default_classes()) {
      EXPECT_NEAR(geodesic_length(flat, c) / flat_length_closed_form(q, c), 1.0, 5e-3)
          << q << " " << c.label();
    }
  }
}

TEST(Spectrum, DefaultClassesOnEuclideanMetric) {
  auto table = spectrum(constant_metric(32, 1.0), default_classes());
  ASSERT_TRUE(table.complete());
  const double expected[] = {1, 1, std::sqrt(2.0), std::sqrt(2.0), std::sqrt(5.0), std::sqrt(5.0)};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(table.entries[i].length, expected[i], 1e-9);
}

TEST(Spectrum, OrientationPairsAgreeExactly) {
  auto table = spectrum(bump_metric(32), {{1, 0}, {-1, 0}, {1, -1}, {-1, 1}});
  EXPECT_EQ(table.entries[0].length, table.entries[1].length);
  EXPECT_EQ(table.entries[2].length, table.entries[3].length);
}

TEST(Spectrum, IsDeterministic) {
  auto m = bump_metric(32);
  auto a = spectrum(m, default_classes());
  auto b = spectrum(m, default_classes());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].length, b.entries[i].length);
}

TEST(Spectrum, ReportsFailureIndexWithPartialTable) {
  auto table = spectrum(bump_metric(32), {{1, 0}, {0, 0}, {0, 1}});
  ASSERT_FALSE(table.complete());
  EXPECT_EQ(*table.failure_index, 1u);
  EXPECT_EQ(table.entries.size(), 1u);
  EXPECT_THROW(spectrum(bump_metric(32), {}), InvalidArgument);
}

TEST(Spectrum, PointwiseDominationImpliesSpectrumDomination) {
  auto a = bump_metric(48);
  ConformalMetric b{a.factor * 1.3 + RealField(GridSpec(48), 0.05), MetricKind::custom, "b"};
  ASSERT_TRUE(check_domination(a, b, 0.0).passed());
  for (auto c : default_classes()) {
    EXPECT_LE(geodesic_length(a, c), geodesic_length(b, c) * (1 + 1e-6)) << c.label();
  }
}

TEST(ScreenClasses, KeepsEverythingWithoutZeros) {
  GridSpec g(32);
  auto s = screen_classes(quartic(smooth_data(g)), default_classes());
  EXPECT_EQ(s.kept.size(), 6u);
  EXPECT_TRUE(s.dropped.empty());
  EXPECT_DOUBLE_EQ(s.radius, 3.0 / 32);
}

TEST(ScreenClasses, DropsClassesThroughZeros) {
  // q vanishes on the lines x = 1/4 and x = 3/4; every class crossing or
  // running along them is dropped.
  GridSpec g(32);
  const std::vector<FourierTerm> one{{{0, 0}, 1.0}};
  const std::vector<FourierTerm> cos2{{{1, 0}, 1.0}, {{-1, 0}, 1.0}};
  auto s = screen_classes(quartic(HiggsData::from_coefficients(one, cos2, g)), default_classes());
  EXPECT_TRUE(s.kept.empty());
  EXPECT_EQ(s.dropped.size(), 6u);
}

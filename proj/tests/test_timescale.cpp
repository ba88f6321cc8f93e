#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tscale/testkit/oracle.hpp"
#include "tscale/timescale.hpp"

namespace {

using namespace tscale;

GridPtr integers(long n) { return make_grid(TimeScaleSpec::integers(n), 1.0); }

std::vector<double> pts(const SampledTimeScale& g) { return {g.points().begin(), g.points().end()}; }

TEST(TimeScaleSpec, ParsesMixedTerms) {
  const auto s = TimeScaleSpec::parse(" [0, 0.5] , {0.75},{1} ");
  ASSERT_EQ(s.components().size(), 3u);
  EXPECT_EQ(std::get<ClosedInterval>(s.components()[0]), (ClosedInterval{0.0, 0.5}));
  EXPECT_EQ(std::get<IsolatedPoint>(s.components()[2]).x, 1.0);
  EXPECT_EQ(s.horizon(), 1.0);
  EXPECT_EQ(TimeScaleSpec::parse(s.to_string()), s);
}

TEST(TimeScaleSpec, SyntaxErrorsReportTermIndex) {
  try {
    TimeScaleSpec::parse("[0,1],{2},(3)");
    FAIL() << "expected a syntax error";
  } catch (const TimeScaleSyntaxError& e) {
    EXPECT_EQ(e.term(), 2u);
  }
  try {
    TimeScaleSpec::parse("[0,1],{x}");
    FAIL();
  } catch (const TimeScaleSyntaxError& e) {
    EXPECT_EQ(e.term(), 1u);
  }
  EXPECT_THROW(TimeScaleSpec::parse(""), TimeScaleSyntaxError);
  EXPECT_THROW(TimeScaleSpec::parse("[0,1],"), TimeScaleSyntaxError);
  EXPECT_THROW(TimeScaleSpec::parse("[1,0]"), TimeScaleSyntaxError);
}

TEST(TimeScaleSpec, RejectsInvariantViolations) {
  EXPECT_THROW(TimeScaleSpec({ClosedInterval{0.1, 1.0}}), std::invalid_argument);  // not from 0
  EXPECT_THROW(TimeScaleSpec({ClosedInterval{0, 1}, ClosedInterval{1, 2}}), std::invalid_argument);
  EXPECT_THROW(TimeScaleSpec({ClosedInterval{0, 1}, IsolatedPoint{0.5}}), std::invalid_argument);
  EXPECT_THROW(TimeScaleSpec({IsolatedPoint{0}}), std::invalid_argument);  // T must be > 0
  EXPECT_THROW(TimeScaleSpec(std::vector<Component>{}), std::invalid_argument);
}

TEST(Sample, EqualSubdivision) {
  const auto g = sample(TimeScaleSpec::interval(1.0), 0.25);
  EXPECT_EQ(pts(g), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
}

TEST(Sample, IsolatedPointsUnaffectedByResolution) {
  const TimeScaleSpec s({IsolatedPoint{0}, IsolatedPoint{1}, IsolatedPoint{2}});
  for (double r : {1e-3, 0.5, 10.0}) EXPECT_EQ(pts(sample(s, r)), (std::vector<double>{0, 1, 2}));
}

TEST(Sample, FlagsComeFromStructure) {
  const auto g = sample(TimeScaleSpec::parse("[0,0.5],{1}"), 0.5);
  ASSERT_EQ(pts(g), (std::vector<double>{0, 0.5, 1}));
  EXPECT_TRUE(g.right_dense(0));
  EXPECT_TRUE(g.right_scattered(1));
  EXPECT_TRUE(g.left_dense(1));
  EXPECT_TRUE(g.left_scattered(2));
  EXPECT_TRUE(g.right_scattered(2));
}

TEST(Sample, FlagsIndependentOfSpacing) {
  // A coarse interval grid has the same spacing as an integer scale but stays dense.
  const auto dense = sample(TimeScaleSpec::interval(3.0), 1.0);
  const auto discrete = sample(TimeScaleSpec::integers(3), 1.0);
  ASSERT_EQ(pts(dense), pts(discrete));
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_TRUE(dense.right_dense(i));
    EXPECT_FALSE(discrete.right_dense(i));
  }
}

TEST(Sample, InsertsRequiredPoints) {
  const double req[] = {0.3};
  const auto g = sample(TimeScaleSpec::interval(1.0), 0.25, req);
  EXPECT_EQ(pts(g), (std::vector<double>{0, 0.25, 0.3, 0.5, 0.75, 1}));
  // Near-coincident node is replaced, not duplicated.
  const double near[] = {0.5 + 1e-13};
  const auto h = sample(TimeScaleSpec::interval(1.0), 0.25, near);
  EXPECT_EQ(h.size(), 5u);
  EXPECT_TRUE(h.index_of(near[0]).has_value());
  EXPECT_EQ(h[2], near[0]);
  const double outside[] = {0.6};
  EXPECT_THROW(sample(TimeScaleSpec::parse("[0,0.5],{1}"), 0.1, outside), std::invalid_argument);
}

TEST(Sample, RejectsBadResolution) {
  EXPECT_THROW(sample(TimeScaleSpec::interval(1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(sample(TimeScaleSpec::interval(1.0), -1.0), std::invalid_argument);
}

TEST(Jumps, SigmaAndRho) {
  const auto z = integers(4);
  EXPECT_EQ(sigma(*z, 1), 2.0);
  EXPECT_EQ(rho(*z, 1), 0.0);
  EXPECT_EQ(sigma(*z, 4), 4.0);
  EXPECT_EQ(rho(*z, 0), 0.0);

  const auto c = sample(TimeScaleSpec::interval(1.0), 0.25);
  EXPECT_EQ(sigma(c, 1), 0.25);
  EXPECT_EQ(rho(c, 2), 0.5);

  const auto m = sample(TimeScaleSpec::parse("[0,1],{2}"), 0.25);
  EXPECT_EQ(sigma(m, 4), 2.0);
  EXPECT_EQ(rho(m, 5), 1.0);
  EXPECT_THROW(sigma(m, 6), std::out_of_range);
}

TEST(Jumps, MonotoneAndBracketing) {
  const auto g = sample(TimeScaleSpec::parse("[0,0.5],{0.75},[1,1.5],{2},{3}"), 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LE(rho(g, i), g[i]);
    EXPECT_LE(g[i], sigma(g, i));
    if (i > 0) {
      EXPECT_LE(sigma(g, i - 1), sigma(g, i));
      EXPECT_LE(rho(g, i - 1), rho(g, i));
    }
  }
}

TEST(Derivatives, ForwardAndBackwardDifferencesOnIntegers) {
  const auto z = integers(3);
  GridFunction u(z, [](double t) { return t * t; });
  const auto d = delta_derivative(u);
  EXPECT_EQ(d[1], 3.0);
  EXPECT_TRUE(d.is_extended(3));
  const auto n = nabla_derivative(u);
  EXPECT_EQ(n[2], 3.0);
  EXPECT_TRUE(n.is_extended(0));
}

TEST(Derivatives, ExactForLinearAndConstant) {
  auto g = make_grid(TimeScaleSpec::interval(1.0), 0.01);
  const auto d = delta_derivative(GridFunction(g, [](double t) { return t; }));
  for (double v : d.values()) EXPECT_NEAR(v, 1.0, 1e-12);
  const auto n = nabla_derivative(GridFunction::constant(g, 3.5));
  for (double v : n.values()) EXPECT_EQ(v, 0.0);
}

TEST(Derivatives, MatchAnalyticOnContinuum) {
  auto g = make_grid(TimeScaleSpec::interval(1.0), 0.001);
  const auto i = *g->index_of(0.5);
  const auto d = delta_derivative(GridFunction(g, [](double t) { return t * t; }));
  EXPECT_NEAR(d[i], 1.0, 1e-3);
  const auto n = nabla_derivative(GridFunction(g, [](double t) { return t * t * t; }));
  EXPECT_NEAR(n[i], 0.75, 2e-3);
}

TEST(Derivatives, NeedTwoPoints) {
  // Smallest legal scale already has two points; probe through a short vector instead.
  auto g = integers(1);
  GridFunction u(g, std::vector<double>{1.0, 2.0});
  EXPECT_EQ(delta_derivative(u)[0], 1.0);
  EXPECT_EQ(nabla_derivative(u)[1], 1.0);
  EXPECT_THROW(GridFunction(g, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Integrals, DirectSumsOnIntegers) {
  const auto z = integers(3);
  GridFunction u(z, [](double t) { return t; });
  EXPECT_EQ(delta_integral(u, 0, 3), 3.0);
  EXPECT_EQ(nabla_integral(u, 0, 3), 6.0);
  EXPECT_EQ(delta_integral(u, 2, 2), 0.0);
  EXPECT_EQ(nabla_integral(GridFunction::constant(integers(2), 1.0), 1, 2), 1.0);
  EXPECT_THROW(delta_integral(u, 2, 1), std::invalid_argument);
  EXPECT_THROW(nabla_integral(u, 0.5, 1), std::invalid_argument);
}

TEST(Integrals, ContinuumAgainstAntiderivative) {
  auto g = make_grid(TimeScaleSpec::interval(1.0), 0.001);
  ASSERT_EQ(g->size(), 1001u);
  EXPECT_NEAR(delta_integral(GridFunction(g, [](double t) { return t; }), 0, 1), 0.5, 1e-3);
  EXPECT_NEAR(nabla_integral(GridFunction(g, [](double t) { return t * t; }), 0, 1), 1.0 / 3.0,
              2e-3);
}

TEST(Integrals, DiscreteMatchesLiteralSummation) {
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const TimeScaleSpec s({IsolatedPoint{0}, IsolatedPoint{0.3}, IsolatedPoint{1.1},
                         IsolatedPoint{1.2}, IsolatedPoint{2.7}, IsolatedPoint{4}});
  auto g = make_grid(s, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g->size());
    for (auto& x : v) x = unit(rng);
    GridFunction u(g, v);
    EXPECT_EQ(delta_integral(u, 0, 4), testkit::literal_delta_sum(g->points(), v, 0, 5));
    EXPECT_EQ(nabla_integral(u, 0.3, 2.7), testkit::literal_nabla_sum(g->points(), v, 1, 4));
  }
}

TEST(Integrals, AdditiveAndLinear) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  auto g = integers(12);
  std::vector<double> a(g->size()), b(g->size());
  for (auto& x : a) x = unit(rng);
  for (auto& x : b) x = unit(rng);
  GridFunction u(g, a), v(g, b);
  const GridFunction w = combine(1.5, u, -0.25, v);
  for (double lo : {0.0, 3.0})
    for (double mid : {5.0, 7.0})
      for (double hi : {9.0, 12.0}) {
        EXPECT_NEAR(delta_integral(u, lo, hi),
                    delta_integral(u, lo, mid) + delta_integral(u, mid, hi), 1e-12);
        EXPECT_NEAR(nabla_integral(u, lo, hi),
                    nabla_integral(u, lo, mid) + nabla_integral(u, mid, hi), 1e-12);
      }
  const double lin = 1.5 * delta_integral(u, 0, 12) - 0.25 * delta_integral(v, 0, 12);
  EXPECT_NEAR(delta_integral(w, 0, 12), lin, 1e-12 * std::max(1.0, std::abs(lin)));

  // Integer data on unit steps: additivity is exact.
  GridFunction k(g, [](double t) { return std::fmod(7 * t, 5.0) - 2.0; });
  EXPECT_EQ(delta_integral(k, 0, 12), delta_integral(k, 0, 5) + delta_integral(k, 5, 12));
  EXPECT_EQ(nabla_integral(k, 0, 12), nabla_integral(k, 0, 5) + nabla_integral(k, 5, 12));
}

TEST(Integrals, FundamentalTheoremTelescopes) {
  auto g = integers(9);
  GridFunction u(g, [](double t) { return t * t * t - 4 * t + 1; });
  EXPECT_EQ(delta_integral(delta_derivative(u), 0, 9), u[9] - u[0]);
  EXPECT_EQ(nabla_integral(nabla_derivative(u), 0, 9), u[9] - u[0]);
}

TEST(Integrals, FirstOrderConvergence) {
  auto err = [](double res) {
    auto g = make_grid(TimeScaleSpec::interval(1.0), res);
    return std::abs(delta_integral(GridFunction(g, [](double t) { return t * t; }), 0, 1) - 1.0 / 3.0);
  };
  for (double res : {0.01, 0.005, 0.0025}) {
    const double ratio = err(res) / err(res / 2);
    EXPECT_GE(ratio, 1.9) << res;
    EXPECT_LE(ratio, 2.1) << res;
  }
}

TEST(SupNorm, Basics) {
  auto g = integers(2);
  EXPECT_EQ(sup_norm(GridFunction::constant(g, 0.0)), 0.0);
  EXPECT_EQ(sup_norm(GridFunction(g, std::vector<double>{1, -3, 2})), 3.0);
  auto c = make_grid(TimeScaleSpec::interval(1.0), 0.01);
  GridFunction u(c, [](double t) { return 0.5 + t - t * t / 2; });
  EXPECT_DOUBLE_EQ(sup_norm(u), 1.0);
  EXPECT_EQ(u[c->last()], sup_norm(u));
}

TEST(GridFunction, RejectsNonFinite) {
  auto g = integers(2);
  EXPECT_THROW(GridFunction(g, std::vector<double>{0, NAN, 1}), std::domain_error);
  EXPECT_THROW(GridFunction(g, std::vector<double>{0, INFINITY, 1}), std::domain_error);
}

TEST(FiniteDifference, FirstOrderAndExactForLinear) {
  const auto spec = TimeScaleSpec::interval(1.0);
  auto sq = [](double t) { return t * t; };
  auto dsq = [](double t) { return 2 * t; };
  const auto r = testkit::finite_difference_check(sq, dsq, spec, 1e-3);
  EXPECT_LE(r.max_error, 2e-3);
  const auto lin = testkit::finite_difference_check([](double t) { return 3 * t - 1; },
                                                    [](double) { return 3.0; }, spec, 1e-3);
  EXPECT_LE(lin.max_error, 1e-12);
  const double ratio = r.max_error / testkit::finite_difference_check(sq, dsq, spec, 5e-4).max_error;
  EXPECT_GE(ratio, 1.8);
  EXPECT_LE(ratio, 2.2);
}

}  // namespace

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tscale/conditions.hpp"
#include "tscale/testkit/oracle.hpp"

namespace {

using namespace tscale;

ConditionContext ctx_for(double p, double T, double eta, const std::string& f, double h_sup = 0) {
  return {PExponent(p), T, eta, Expr::parse(f), h_sup};
}

TEST(Constants, Alpha) {
  EXPECT_DOUBLE_EQ(alpha(2, 1), 2.0);
  EXPECT_DOUBLE_EQ(alpha(2, 2), 6.0);
  EXPECT_NEAR(alpha(3, 1), 2 * std::sqrt(2.0), 1e-14);
  EXPECT_THROW(alpha(1, 1), std::invalid_argument);
  EXPECT_THROW(alpha(2, 0), std::invalid_argument);
}

TEST(Constants, CapitalA) {
  for (double a : {0.1, 1.0, 7.0}) EXPECT_DOUBLE_EQ(capital_A(a, 3, 1.5, 0), 1 / alpha(3, 1.5));
  EXPECT_DOUBLE_EQ(capital_A(4, 2, 1, 0), 0.5);
  EXPECT_DOUBLE_EQ(capital_A(1, 2, 1, 0.1), 0.4);
  EXPECT_LT(capital_A(0.1, 2, 1, 1.0), 0.0);
  EXPECT_THROW(capital_A(0, 2, 1, 0), std::invalid_argument);
  EXPECT_THROW(capital_A(1, 2, 1, -1), std::invalid_argument);
}

TEST(Constants, CapitalB) {
  EXPECT_DOUBLE_EQ(capital_B(2, 1, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(capital_B(3, 2, 1), 1.0);
  EXPECT_LT(capital_B(2, 1, 1 - 1e-6), 1.1e-6);
  EXPECT_GT(capital_B(2, 1, 1 - 1e-6), 0.0);
  EXPECT_THROW(capital_B(2, 1, 1), std::invalid_argument);
  EXPECT_THROW(capital_B(2, 1, 0), std::invalid_argument);
}

TEST(Constants, HSupNorm) {
  EXPECT_EQ(h_sup_norm(Expr::parse("0"), 1, 100), 0.0);
  EXPECT_NEAR(h_sup_norm(Expr::parse("0.1 * t"), 1, 1000), 0.1, 1e-4);
  EXPECT_NEAR(h_sup_norm(Expr::parse("sin(t)"), 3.2, 10000), 1.0, 1e-4);
  EXPECT_THROW(h_sup_norm(Expr::parse("t"), 1, 1), std::invalid_argument);
}

TEST(Constants, AgreeWithDirectFormulas) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pd(1.1, 6), td(0.1, 5), fr(0.01, 0.99), ad(0.01, 20),
      hd(0, 2);
  for (int k = 0; k < 1000; ++k) {
    const double p = pd(rng), T = td(rng), eta = fr(rng) * T, a = ad(rng), h = hd(rng);
    const auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
    EXPECT_LE(rel(alpha(p, T), testkit::direct_alpha(p, T)), 1e-12);
    EXPECT_LE(rel(capital_A(a, p, T, h), testkit::direct_A(a, p, T, h)), 1e-12);
    EXPECT_LE(rel(capital_B(p, T, eta), testkit::direct_B(p, T, eta)), 1e-12);
  }
}

TEST(ExistencePair, Examples) {
  const auto ctx = ctx_for(2, 1, 0.5, "1");
  auto [up, lo] = check_existence_pair(ctx, 4, 0.5, 101);
  EXPECT_TRUE(up.passed);
  EXPECT_TRUE(lo.passed);
  EXPECT_EQ(up.lhs, 1.0);
  EXPECT_DOUBLE_EQ(up.rhs, 2.0);
  EXPECT_DOUBLE_EQ(lo.rhs, 0.25);
  EXPECT_EQ(up.id, "(i)");
  EXPECT_EQ(lo.id, "(ii)");
  EXPECT_EQ(up.samples, 101u);

  std::tie(up, lo) = check_existence_pair(ctx, 1, 0.5, 101);
  EXPECT_FALSE(up.passed);
  EXPECT_DOUBLE_EQ(up.rhs, 0.5);

  const auto lin = ctx_for(2, 1, 0.5, "u");
  std::tie(up, lo) = check_existence_pair(lin, 1, 1e-6, 101);
  EXPECT_FALSE(lo.passed);
  EXPECT_EQ(lo.lhs, 0.0);
  EXPECT_EQ(lo.extremum_at, 0.0);

  EXPECT_THROW(check_existence_pair(ctx, 1, 1, 11), std::invalid_argument);
  EXPECT_THROW(check_existence_pair(ctx, 0, -1, 11), std::invalid_argument);
}

TEST(ExistencePair, FromProblemSpec) {
  const ProblemSpec spec{PExponent(2), 1, 0.5, Expr::parse("1"), Expr::parse("0.1 * t"),
                         TimeScaleSpec::interval(1), 1e-2};
  const auto [up, lo] = check_existence_pair(4, 0.5, spec, 1001);
  EXPECT_NEAR(up.rhs, 4 * capital_A(4, 2, 1, 0.1), 1e-12);
  EXPECT_TRUE(up.passed && lo.passed);
}

TEST(ExistencePair, LargeHGivesDiagnostic) {
  const auto ctx = ctx_for(2, 1, 0.5, "1", 5.0);
  const auto up = check_upper(ctx, 1, 11);
  EXPECT_FALSE(up.passed);
  EXPECT_NE(up.diagnostic.find("h too large for this a"), std::string::npos);
}

TEST(ExistencePair, SampledExtremaMatchOracle) {
  const auto ctx = ctx_for(2.5, 1, 0.3, "1 + sin(3*u)^2");
  const auto up = check_upper(ctx, 2, 1001);
  const auto lo = check_lower(ctx, 2, 1001);
  EXPECT_EQ(up.lhs, testkit::direct_extremum(ctx.f, 2, 1001, true));
  EXPECT_EQ(lo.lhs, testkit::direct_extremum(ctx.f, 2, 1001, false));
  EXPECT_NEAR(ctx.f.eval(up.extremum_at, std::nullopt), up.lhs, 0);
}

TEST(ExistencePair, MonotoneInAWithoutH) {
  // f is flat beyond u = 1, so the maximum stops growing while a A(a) = a / alpha does.
  const auto ctx = ctx_for(2, 1, 0.5, "min(u, 1) + 0.5");
  bool seen_pass = false;
  for (double a = 0.5; a <= 10; a += 0.25) {
    const bool pass = check_upper(ctx, a, 2001).passed;
    if (seen_pass && a > 1) {
      EXPECT_TRUE(pass) << a;
    }
    seen_pass = seen_pass || pass;
  }
  EXPECT_TRUE(seen_pass);
}

TEST(Multiplicity, TwoLevelsMatchExistencePair) {
  const auto ctx = ctx_for(3, 1.2, 0.4, "0.2 + u^2 / (1 + u)");
  const auto rep = scan_multiplicity(ctx, {0.3, 5.0}, 501);
  const auto up = check_upper(ctx, 0.3, 501);
  const auto lo = check_lower(ctx, 5.0, 501);
  ASSERT_EQ(rep.checks.size(), 2u);
  EXPECT_EQ(rep.checks[0], up);
  EXPECT_EQ(rep.checks[1], lo);
}

TEST(Multiplicity, ConstantFThresholds) {
  // p = 2, T = 1, eta = 0.5: (i) at a iff c <= a/2, (ii) at b iff c >= b/2.
  const auto ctx = ctx_for(2, 1, 0.5, "1.5");
  for (double a : {1.0, 2.9, 3.0, 3.1, 8.0}) {
    EXPECT_EQ(check_upper(ctx, a, 11).passed, a >= 3.0) << a;
    EXPECT_EQ(check_lower(ctx, a, 11).passed, a <= 3.0) << a;
  }
}

TEST(Multiplicity, ThreeLevelsTwoShells) {
  // Plateau f: 1 below u = 1.1 then ~5.2 until 2.5 then ~26 above 6.
  const auto ctx = ctx_for(2, 0.5, 0.25,
                           "1 + 4.2 * min(max((u - 1.1) / 0.2, 0), 1)"
                           " + 20.8 * min(max((u - 2.5) / 3.5, 0), 1)");
  const auto rep = scan_multiplicity(ctx, {1, 3.5, 25}, kDefaultConditionSamples);
  EXPECT_TRUE(rep.all_passed);
  ASSERT_EQ(rep.shells.size(), 2u);
  EXPECT_EQ(rep.shells[0], std::make_pair(1.0, 3.5));
  EXPECT_EQ(rep.shells[1], std::make_pair(3.5, 25.0));
}

TEST(Multiplicity, Errors) {
  const auto ctx = ctx_for(2, 1, 0.5, "1");
  EXPECT_THROW(scan_multiplicity(ctx, {1}, 11), std::invalid_argument);
  EXPECT_THROW(scan_multiplicity(ctx, {1, 1}, 11), std::invalid_argument);
  EXPECT_THROW(scan_multiplicity(ctx, {2, 1}, 11), std::invalid_argument);
  EXPECT_THROW(scan_multiplicity(ctx, {-1, 1}, 11), std::invalid_argument);
  EXPECT_FALSE(scan_multiplicity(ctx, {1, 3}, 11).all_passed);
  EXPECT_TRUE(scan_multiplicity(ctx, {1, 3}, 11).shells.empty());
}

TEST(InfiniteScan, ConstantFHasNoPassingPairs) {
  const auto rep = scan_infinite(ctx_for(2, 1, 0.5, "0.3"), 1, 0.5, 10, 101);
  ASSERT_EQ(rep.pairs.size(), 10u);
  EXPECT_EQ(rep.run_length, 0u);
  for (const auto& pr : rep.pairs) {
    EXPECT_TRUE(pr.lower.passed);
    EXPECT_FALSE(pr.upper.passed);
    EXPECT_GT(pr.a, pr.b);
  }
  for (std::size_t k = 1; k < rep.pairs.size(); ++k) EXPECT_GT(rep.pairs[k - 1].b, rep.pairs[k].a);
}

TEST(InfiniteScan, OscillatingCoefficient) {
  // f = u (c1 + c2 sin(log u)): the pass pattern follows where g = f/u lies between B and 1/alpha
  // over the relevant ranges.
  const auto ctx = ctx_for(2, 0.2, 0.195, "u * (2 + 1.5 * sin(log(u + 1e-300))) + 1e-4");
  const auto rep = scan_infinite(ctx, 1, 0.5, 8, 10001);
  EXPECT_GE(rep.run_length, 1u);
  for (const auto& pr : rep.pairs) EXPECT_EQ(pr.passed, pr.upper.passed && pr.lower.passed);
}

TEST(InfiniteScan, Errors) {
  const auto ctx = ctx_for(2, 1, 0.5, "1");
  EXPECT_THROW(scan_infinite(ctx, 1, 1, 3, 11), std::invalid_argument);
  EXPECT_THROW(scan_infinite(ctx, 1, 0, 3, 11), std::invalid_argument);
  EXPECT_THROW(scan_infinite(ctx, 0, 0.5, 3, 11), std::invalid_argument);
  EXPECT_THROW(scan_infinite(ctx, 1, 0.5, 0, 11), std::invalid_argument);
  EXPECT_EQ(scan_infinite(ctx, 1, 0.5, 1, 11).run_length, 0u);
}

}  // namespace

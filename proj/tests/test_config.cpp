#include <gtest/gtest.h>

#include <string>

#include "tscale/config.hpp"

namespace {

using namespace tscale;

const char* kMinimal = R"(# closed form
[problem]
p = 2
T = 1
eta = 0.5
f = 1
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

TEST(Config, MinimalFillsDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.p, 2.0);
  EXPECT_EQ(c.f, Expr::constant(1));
  EXPECT_EQ(c.h, Expr::constant(0));
  EXPECT_EQ(c.kind, TimeScaleKind::interval);
  EXPECT_EQ(c.resolution, 1e-3);
  EXPECT_EQ(c.tol, 1e-10);
  EXPECT_EQ(c.max_iter, 1000u);
  EXPECT_EQ(c.samples, kDefaultConditionSamples);
  EXPECT_FALSE(c.a.has_value());
  const BoundaryValueProblem bvp(c.problem());
  EXPECT_EQ(bvp.grid().size(), 1001u);
}

TEST(Config, FullConfig) {
  const auto c = parse_config(R"(
[problem]
p = 3
T = 1
eta = 0.75    # trailing comment
f = u^2 + sin(u)
h = 0.1*t
[timescale]
kind = union
spec = [0,0.5],{0.75},{1}
resolution = 0.01
[solver]
tol = 1e-12
max_iter = 50
damping = 0.5
init = 2
[check]
a = 4
b = 0.5
levels = 1, 3.5, 25
a0 = 1
ratio = 0.5
k_max = 8
samples = 2001
)");
  EXPECT_EQ(c.kind, TimeScaleKind::union_);
  EXPECT_EQ(c.timescale(), TimeScaleSpec::parse("[0,0.5],{0.75},{1}"));
  EXPECT_EQ(c.levels, (std::vector<double>{1, 3.5, 25}));
  EXPECT_EQ(*c.k_max, 8u);
  EXPECT_EQ(c.solver().damping, 0.5);
  EXPECT_EQ(std::get<double>(c.solver().initial_guess), 2.0);
}

TEST(Config, IntegerKind) {
  const auto c = parse_config("[problem]\np=2\nT=2\neta=1\nf=1\n[timescale]\nkind=integer\n");
  EXPECT_EQ(c.timescale(), TimeScaleSpec::integers(2));
  EXPECT_NE(error_of("[problem]\np=2\nT=2\neta=0.5\nf=1\n[timescale]\nkind=integer\n")
                .find("not a point"),
            std::string::npos);
}

TEST(Config, EtaConstraintNamesBothKeys) {
  const auto msg = error_of("[problem]\np=2\nT = 1.0\neta = 1.5\nf=1\n");
  EXPECT_NE(msg.find("'eta'"), std::string::npos);
  EXPECT_NE(msg.find("'T'"), std::string::npos);
  EXPECT_NE(msg.find("line 4"), std::string::npos);
}

TEST(Config, ExpressionSyntaxErrorCarriesOffset) {
  const auto msg = error_of("[problem]\np=2\nT=1\neta=0.5\nf = u^\n");
  EXPECT_NE(msg.find("line 5"), std::string::npos);
  EXPECT_NE(msg.find("offset 2"), std::string::npos) << msg;
}

TEST(Config, StrictKeys) {
  EXPECT_NE(error_of(std::string(kMinimal) + "q = 3\n").find("unknown key 'q'"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "p = 3\n").find("duplicate key 'p'"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[extra]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("p = 2\n").find("outside of any section"), std::string::npos);
  EXPECT_NE(error_of("[problem]\np=2\nT=1\neta=0.5\n").find("missing required key 'f'"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[solver]\ntol = abc\n").find("line 8"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[solver]\ndamping = 0\n").find("damping"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "h = u\n").find("'h'"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[check]\na = 1\nb = 2\n").find("'a' and 'b'"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[check]\nlevels = 1, 1\n").find("levels"),
            std::string::npos);
}

TEST(Config, PrintRoundTrip) {
  const std::string texts[] = {
      kMinimal,
      "[problem]\np=1.5\nT=1\neta=0.75\nf=u*(2+sin(u))\nh=0.25+t\n[timescale]\nkind=union\n"
      "spec={0},[0.25,0.5],{0.75},{1}\nresolution=0.01\n[check]\nlevels=1,2,3\nratio=0.25\n",
  };
  for (const auto& text : texts) {
    const auto c = parse_config(text);
    const auto printed = print_config(c);
    const auto back = parse_config(printed);
    EXPECT_EQ(back, c);
    EXPECT_EQ(print_config(back), printed);
  }
}

}  // namespace

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "iterfunc/conjugation.hpp"
#include "iterfunc/contraction.hpp"
#include "iterfunc/multeq.hpp"

using namespace iterfunc;

namespace {

const double e = std::numbers::e;

PiecewiseExpr ex1_G() { return parse_expression("on (0,1]: 1 ; on [1,e]: exp((1+log(x))*log(x)/2) ; on [e,inf): e"); }
PiecewiseExpr ex2_G() { return parse_expression("on (0,1]: 1 ; on [1,e]: x^(1/3) ; on [e,inf): exp(1/(3*log(x)))"); }

void expect_code(ErrorCode code, const auto& fn) {
  try {
    fn();
    ADD_FAILURE() << "no error thrown";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), code) << err.what();
  }
}

}  // namespace

TEST(ConjTarget, Example1) {
  const auto F = conj_explog_target(ex1_G());
  for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(F.eval(x), x * (1 + x) / 2, 1e-14);
  EXPECT_NEAR(F.eval(-3.0), 0.0, 1e-15);
  EXPECT_NEAR(F.eval(4.0), 1.0, 1e-15);
}

TEST(ConjTarget, Example2) {
  const auto F = conj_explog_target(ex2_G());
  EXPECT_NEAR(F.eval(-1.0), 0.0, 1e-15);
  EXPECT_NEAR(F.eval(0.6), 0.2, 1e-14);
  EXPECT_NEAR(F.eval(2.0), 1.0 / 6, 1e-14);
  EXPECT_NEAR(F.eval(30.0), 1.0 / 90, 1e-14);
}

TEST(ConjTarget, OpaqueRoundTrip) {
  const auto G = Target::from(ex1_G());
  const auto back = conj_explog_target_back(conj_explog_target(G));
  for (double x : {0.3, 1.0, 1.7, e, 9.0}) EXPECT_NEAR(back(x), G(x), 1e-12 * G(x));
}

TEST(ConjTarget, NonPositiveTargetRejected) {
  expect_code(ErrorCode::MathDomain, [] { conj_explog_target(parse_expression("on (0,inf): x - 2")); });
}

TEST(ConjFunction, RoundTrip) {
  gen::Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = gen::increasing(rng, 0.5, 3, gen::count(rng, 2, 60)).map_values([](double v) { return v + 2.5; }, Extension::ClampToEndpointValues);
    const auto f = conj_explog_fn(g);
    const auto back = conj_explog_fn(f, Direction::Backward);
    ASSERT_EQ(back.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(back.knots()[i], g.knots()[i], 1e-12 * g.knots()[i]);
      EXPECT_NEAR(back.values()[i], g.values()[i], 1e-12 * g.values()[i]);
    }
  }
}

TEST(ConjFunction, NonPositiveRejected) {
  const GridFunction g({1.0, 2.0}, {0.0, 1.0}, Extension::ClampToEndpointValues, true);
  expect_code(ErrorCode::NonPositiveValues, [&] { conj_explog_fn(g); });
}

TEST(Negation, Parity) {
  const auto g = GridFunction::identity(1, 2);
  EXPECT_NO_THROW(conj_negation(g, {1}));
  expect_code(ErrorCode::ParityViolation, [&] { conj_negation(g, {0.75, 0.25}); });
  expect_code(ErrorCode::ParityViolation, [&] { conj_negation(g, {1, 1}); });
  EXPECT_NO_THROW(conj_negation(g, {6, 3}));
  EXPECT_NO_THROW(conj_negation(g, {-2, 3}));
}

TEST(Negation, MirrorsGraph) {
  const auto g = GridFunction::sampled([](double x) { return x * x; }, uniform_knots(1, 2, 65));
  const auto h = conj_negation(g, {1});
  EXPECT_EQ(h.domain().lo, -2.0);
  EXPECT_EQ(h.domain().hi, -1.0);
  for (double x : {-2.0, -1.5, -1.0}) EXPECT_DOUBLE_EQ(h.eval(x), -g.eval(-x));
}

TEST(Negation, Involution) {
  gen::Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = gen::increasing(rng, 0.5, 3, gen::count(rng, 2, 40));
    const auto back = conj_negation(conj_negation(g, {3}), {3});
    ASSERT_EQ(back.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(back.knots()[i], g.knots()[i], 1e-12);
      EXPECT_NEAR(back.values()[i], g.values()[i], 1e-12);
    }
  }
}

TEST(Normalize, Examples) {
  auto n = normalize_exponents({6, 3});
  EXPECT_DOUBLE_EQ(n.scale, 9);
  EXPECT_DOUBLE_EQ(n.alpha[0], 2.0 / 3);
  EXPECT_DOUBLE_EQ(n.alpha[1], 1.0 / 3);
  n = normalize_exponents({-2, 3});
  EXPECT_DOUBLE_EQ(n.scale, 1);
  EXPECT_DOUBLE_EQ(n.alpha[0], -2);
  expect_code(ErrorCode::ZeroSum, [] { normalize_exponents({1, -1}); });
}

TEST(Normalize, ScaledTargets) {
  const auto G = scale_target_multiplicative(parse_expression("on (0,inf): x^9"), 9);
  EXPECT_NEAR(G.eval(2.0), 2.0, 1e-14);
  const auto F = scale_target_additive(parse_expression("on (-inf,inf): 9*x"), 9);
  EXPECT_NEAR(F.eval(-1.5), -1.5, 1e-14);
}

// Residuals transport through the conjugation: if r(x) = sum a_k f^k(x) - F(x)
// for f = log o g o exp, then prod (g^k)^{a_k}(x) - G(x) = G(x) (e^{r(log x)} - 1).
TEST(ConjProperty, ResidualTransport) {
  gen::Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = gen::member(rng, {0, 1}, 0.3, 2.5, gen::count(rng, 2, 20));
    const auto g = [&](double x) { return std::exp(f.eval(std::log(x))); };
    const std::vector<double> alpha{gen::uniform(rng, 0.1, 1), gen::uniform(rng, -0.5, 0.5)};
    const double c = gen::uniform(rng, 0.5, 1.5), s = gen::uniform(rng, -0.2, 0.2);
    const auto F = [&](double x) { return c * x + s * x * x; };
    const auto G = [&](double x) { return std::exp(F(std::log(x))); };
    const double x = std::exp(gen::uniform(rng, 0, 1));
    const std::array<double, 1> px{x}, pl{std::log(x)};
    const double r = residual_polynomial(f, alpha, F, pl);
    const double m = residual_multiplicative(g, alpha, G, px);
    EXPECT_GE(m, G(x) * -std::expm1(-r) * (1 - 1e-9) - 1e-14);
    EXPECT_LE(m, G(x) * std::expm1(r) * (1 + 1e-9) + 1e-14);
  }
}

TEST(ConjProperty, ExactSolutionTransports) {
  // Any f with F := sum a_k f^k gives a zero residual on both sides.
  gen::Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = gen::member(rng, {0, 1}, 0.4, 2, gen::count(rng, 2, 20));
    const std::vector<double> alpha{0.6, 0.4};
    const auto F = [&](double x) { return 0.6 * f.eval(x) + 0.4 * f.eval(f.eval(x)); };
    const auto G = [&](double x) { return std::exp(F(std::log(x))); };
    const auto g = [&](double x) { return std::exp(f.eval(std::log(x))); };
    const auto probes = probe_points(1, e, 33);
    EXPECT_LE(residual_multiplicative(g, alpha, G, probes), 1e-13);
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sfp/analysis.hpp"
#include "sfp/quadrature.hpp"
#include "test_support.hpp"

using namespace sfp;

namespace {
constexpr double kE = std::numbers::e;

/// Closed-form reduction of the stationary-density integral after the
/// substitution t = 1/(y + c): f(x) = mu int_0^{1/c} t e^{-xt} / (1 + (mu - c) t)^2 dt.
double pdf_integral_oracle(double x, double mu) {
  const double c = mu / kE;
  auto g = [&](double t) {
    const double d = 1.0 + (mu - c) * t;
    return mu * t * std::exp(-x * t) / (d * d);
  };
  return sfp::testing::simpson(g, 0.0, 1.0 / c, 40'000);
}
}  // namespace

TEST(Quadrature, Polynomials) {
  EXPECT_NEAR(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0).value, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, 50.0).value,
              -std::expm1(-50.0), 1e-12);
}

TEST(Quadrature, EndpointSingularity) {
  const auto r = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-10);
  EXPECT_GT(r.intervals, 1u);
  EXPECT_LE(r.error, 1e-10);
}

TEST(Quadrature, GivesUp) {
  QuadratureOptions o;
  o.max_intervals = 4;
  EXPECT_THROW(integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, o),
               NumericError);
}

TEST(Calibration, CMuPreconditions) {
  RandomSource rng(1);
  const auto few = log_space(1.0, 1e4, 9);
  EXPECT_THROW(calibrate_c_mu(few, 100, rng), InsufficientDataError);
  const auto narrow = log_space(1.0, 50.0, 12);
  EXPECT_THROW(calibrate_c_mu(narrow, 100, rng), ParameterError);
  const std::vector<double> single{10.0};
  EXPECT_THROW(calibrate_c_mu(single, 100, rng), InsufficientDataError);
}

TEST(Calibration, MedianGrowsLinearlyInC) {
  RandomSource rng(42);
  const auto cs = log_space(1.0, 1e4, 12);
  const auto cal = calibrate_c_mu(cs, 20'000, rng);
  ASSERT_EQ(cal.medians.size(), 12u);
  EXPECT_NEAR(cal.fit.slope, 2.62, 0.15);
  EXPECT_GT(cal.fit.r2, 0.999);
  EXPECT_LT(cal.slope_ci.lo, cal.fit.slope);
  EXPECT_GT(cal.slope_ci.hi, cal.fit.slope);
  for (std::size_t i = 0; i < cs.size(); ++i) EXPECT_NEAR(cal.medians[i] / cs[i], 2.62, 0.2);
}

TEST(Calibration, LogSpace) {
  const auto v = log_space(1.0, 1000.0, 4);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], 1.0);
  EXPECT_NEAR(v[1], 10.0, 1e-12);
  EXPECT_NEAR(v[2], 100.0, 1e-10);
  EXPECT_EQ(v[3], 1000.0);
  EXPECT_THROW(log_space(0.0, 1.0, 4), ParameterError);
}

TEST(Calibration, ShapeExponentInvertsToSlope) {
  RandomSource rng(5);
  const std::vector<double> as{0.5, 1.0, 2.0};
  const auto pts = calibrate_a_rho(as, 50'000, rng);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_NEAR(pts[0].fitted_rho, 2.0, 0.2);
  EXPECT_NEAR(pts[1].fitted_rho, 1.0, 0.1);
  EXPECT_NEAR(pts[2].fitted_rho, 0.5, 0.05);
  for (const auto& p : pts) EXPECT_TRUE(p.within_tolerance) << p.a;
  const std::vector<double> bad{3.0};
  EXPECT_THROW(calibrate_a_rho(bad, 100, rng), ParameterError);
}

TEST(Moments, ClosedForms) {
  const auto h = stationary_moments(0.5, 1.0);
  EXPECT_DOUBLE_EQ(h.mean, 2.0);
  ASSERT_TRUE(h.variance);
  EXPECT_DOUBLE_EQ(*h.variance, 8.0);
  EXPECT_TRUE(std::isinf(stationary_moments(1.0, 1.0).mean));
  EXPECT_FALSE(stationary_moments(1.0, 1.0).variance);
  EXPECT_FALSE(stationary_moments(0.8, 1.0).variance);
  EXPECT_TRUE(stationary_moments(0.7, 1.0).variance);
  for (double alpha : {0.1, 0.45, 0.9}) {
    const auto r = stationary_moments(alpha, 2.5);
    EXPECT_NEAR(r.mean, alpha * r.mean + 2.5, 1e-12);
  }
  EXPECT_THROW(stationary_moments(1.5, 1.0), ParameterError);
  EXPECT_THROW(stationary_moments(0.5, 0.0), ParameterError);
}

TEST(Moments, MatchSimulatedLinearChain) {
  // alpha = 0.3 keeps the fourth moment finite, so the sample variance is a
  // usable estimator.
  const double alpha = 0.3, c = 1.0;
  RandomSource rng(81);
  double state = c;
  std::vector<double> xs;
  for (int i = 0; i < 1'000'000; ++i) {
    state = (alpha * state + c) * unit_exponential(rng);
    xs.push_back(state);
  }
  const auto mv = sfp::testing::sample_moments(xs);
  const auto r = stationary_moments(alpha, c);
  EXPECT_NEAR(mv[0] / r.mean, 1.0, 0.01);
  EXPECT_NEAR(mv[1] / *r.variance, 1.0, 0.03);
}

TEST(Markov, RowsAreStochastic) {
  const auto p = markov_transition_matrix({300, 2.0});
  for (std::size_t i = 0; i < p.size(); ++i) {
    double s = 0.0;
    for (double v : p.row(i)) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_THROW(markov_transition_matrix({1, 1.0}), ParameterError);
  EXPECT_THROW(markov_transition_matrix({10, 0.0}), ParameterError);
}

TEST(Markov, TwoStateClosedForm) {
  const double c = 1.0;
  const auto p = markov_transition_matrix({2, c});
  EXPECT_NEAR(p(0, 0), 1.0 - std::exp(-1.0 / (1.0 + c)), 1e-15);
  EXPECT_NEAR(p(0, 1), std::exp(-1.0 / (1.0 + c)), 1e-15);
  EXPECT_NEAR(p(1, 0), 1.0 - std::exp(-1.0 / (2.0 + c)), 1e-15);
  const double a = p(0, 1), b = p(1, 0);
  const auto pi = stationary_distribution(p);
  EXPECT_NEAR(pi[0], b / (a + b), 1e-9);
  EXPECT_NEAR(pi[1], a / (a + b), 1e-9);
}

TEST(Markov, StationaryIsFixedPoint) {
  const auto p = markov_transition_matrix({400, 1.0});
  StationaryOptions o;
  const auto pi = stationary_distribution(p, o);
  double total = 0.0, change = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) v += pi[i] * p(i, j);
    change += std::abs(v - pi[j]);
    total += pi[j];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_LT(change, 2.0 * o.tol);
}

TEST(Markov, DegenerateAndSymmetricChains) {
  TransitionMatrix id(3);
  for (std::size_t i = 0; i < 3; ++i) id(i, i) = 1.0;
  for (double v : stationary_distribution(id)) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  TransitionMatrix half(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) half(i, j) = 0.5;
  for (double v : stationary_distribution(half)) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Markov, IterationCap) {
  StationaryOptions o;
  o.max_iterations = 1;
  EXPECT_THROW(stationary_distribution(markov_transition_matrix({50, 1.0}), o), NumericError);
}

TEST(Markov, StateCountAndReference) {
  EXPECT_EQ(default_state_count(1.0), 2000u);
  EXPECT_EQ(default_state_count(100.0), static_cast<std::size_t>(std::ceil(50.0 * kE * 100.0)));
  const auto q = discretized_llg(100, LogLogisticParams(kE, 1.0));
  double s = 0.0;
  for (double v : q) s += v;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(q[0], llg_cdf(1.0, LogLogisticParams(kE, 1.0)), 1e-15);
  const std::vector<double> a{0.5, 0.5}, b{1.0, 0.0};
  EXPECT_DOUBLE_EQ(total_variation(a, b), 0.5);
  EXPECT_THROW(total_variation(a, std::vector<double>{1.0}), ParameterError);
}

TEST(PdfIntegral, MatchesReducedFormOracle) {
  for (double mu : {kE, 100.0, 1e4}) {
    for (double x : log_space(mu / 100.0, mu * 100.0, 9)) {
      const double want = pdf_integral_oracle(x, mu);
      EXPECT_NEAR(sfp_pdf_integral(x, mu) / want, 1.0, 1e-8) << "mu=" << mu << " x=" << x;
    }
  }
  EXPECT_THROW(sfp_pdf_integral(0.0, kE), DomainError);
}

TEST(PdfIntegral, IsADensity) {
  // Mass beyond 1e6 mu is about 1e-6, below 1e-10 about 1e-11.
  const double mu = kE;
  auto f = [&](double s) {
    const double x = std::exp(s);
    return sfp_pdf_integral(x, mu) * x;
  };
  EXPECT_NEAR(sfp::testing::simpson(f, std::log(1e-10), std::log(1e6 * mu), 4000), 1.0, 1e-4);
}

TEST(PdfIntegral, NonnegativeAndDecreasingBeyondMu) {
  for (double mu : {kE, 100.0}) {
    double prev = sfp_pdf_integral(mu / 1000.0, mu);
    EXPECT_GT(prev, 0.0);
    double at_mu = sfp_pdf_integral(mu, mu);
    for (double x : log_space(mu, 1000.0 * mu, 60)) {
      const double v = sfp_pdf_integral(x, mu);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, at_mu);
      at_mu = v;
    }
  }
}

TEST(TailCheck, ExponentialSamplesFail) {
  RandomSource rng(11);
  const auto t = tail_exponent_check(poisson_process(kE, 100'000, rng), 1.0);
  EXPECT_FALSE(t.pass) << t.alpha_hat;
}

TEST(TailCheck, UnitShape) {
  RandomSource rng(10);
  const auto t = tail_exponent_check(sfp_simple(kE, 100'000, rng), 1.0);
  EXPECT_NEAR(t.expected, 2.0, 0.0);
  EXPECT_TRUE(t.pass) << t.alpha_hat;
  EXPECT_THROW(tail_exponent_check(sfp_simple(kE, 1000, rng), 1.0), InsufficientDataError);
}

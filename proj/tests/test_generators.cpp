#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <vector>

#include "sfp/fitting.hpp"
#include "sfp/generators.hpp"
#include "sfp/stats.hpp"
#include "sfp/temporal.hpp"
#include "test_support.hpp"

using namespace sfp;
using sfp::testing::ScriptedSource;
using sfp::testing::uniform_for_exponential;

namespace {

constexpr double kE = std::numbers::e;

std::vector<double> as_vector(const InterEventSeries& s) { return {s.begin(), s.end()}; }

std::vector<double> recorded_uniforms(std::uint64_t seed, std::size_t n) {
  RandomSource rng(seed);
  std::vector<double> u(n);
  for (double& v : u) v = rng.uniform();
  return u;
}

}  // namespace

TEST(SfpSimple, SingleEventIsMu) {
  RandomSource rng(1);
  const auto s = sfp_simple(4.25, 1, rng);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 4.25);
}

TEST(SfpSimple, ForcedUnitDraws) {
  ScriptedSource src({uniform_for_exponential(1.0)});
  const auto s = sfp_simple(kE, 3, src);
  EXPECT_EQ(s[0], kE);
  EXPECT_NEAR(s[1], kE + 1.0, 1e-14);
  EXPECT_NEAR(s[2], kE + 2.0, 1e-14);
  EXPECT_EQ(src.consumed(), 2u);
}

TEST(SfpSimple, MedianNearMu) {
  RandomSource rng(2024);
  const double m = median(std::move(sfp_simple(kE, 100'000, rng)).release());
  EXPECT_NEAR(m / kE, 1.0, 0.10);
}

TEST(SfpSimple, RejectsBadParameters) {
  RandomSource rng(1);
  EXPECT_THROW(sfp_simple(0.0, 5, rng), ParameterError);
  EXPECT_THROW(sfp_simple(1.0, 0, rng), ParameterError);
  EXPECT_THROW(sfp_general(1.0, 0.0, 5, rng), ParameterError);
  EXPECT_THROW(sfp_legacy(-1.0, 1.0, 5, rng), ParameterError);
  EXPECT_THROW(poisson_process(0.0, 5, rng), ParameterError);
}

TEST(SfpGeneral, UnitShapeReproducesSimple) {
  RandomSource a(77), b(77);
  EXPECT_EQ(as_vector(sfp_general(3.3, 1.0, 5000, a)), as_vector(sfp_simple(3.3, 5000, b)));
}

TEST(SfpGeneral, FirstGapIsRootOfSeedState) {
  RandomSource rng(1);
  EXPECT_NEAR(sfp_general(9.0, 2.0, 1, rng)[0], 3.0, 1e-15);
}

TEST(SfpGeneral, ShapeTwoSlopeAndMedian) {
  RandomSource rng(31);
  const auto s = sfp_general(kE, 2.0, 100'000, rng);
  const auto fit = fit_or_powerlaw(or_curve(s));
  EXPECT_NEAR(fit.rho, 2.0, 0.1);
  EXPECT_NEAR(median(as_vector(s)) / kE, 1.0, 0.10);
}

TEST(SfpGeneral, IncrementalChainMatchesBatch) {
  RandomSource a(5), b(5);
  SfpChain chain(12.0, 0.7);
  const auto batch = sfp_general(12.0, 0.7, 1000, b);
  for (std::size_t k = 0; k < 1000; ++k) EXPECT_EQ(chain.next(a), batch[k]);
}

TEST(SfpLegacy, DiffersFromSimpleOnlyInSeedState) {
  // With C = mu/e the recursions agree, but the chain starts at C instead
  // of mu, so every later state differs by the propagated offset.
  const auto u = recorded_uniforms(9, 10);
  ScriptedSource a(u), b(u);
  const double mu = 5.0, c = mu / kE;
  const auto legacy = sfp_legacy(c, 1.0, 3, a);
  const auto simple = sfp_simple(mu, 3, b);
  EXPECT_EQ(legacy[0], c);
  EXPECT_EQ(simple[0], mu);
  const double e1 = -std::log(u[0]);
  EXPECT_NEAR(legacy[1], (c + c) * e1, 1e-12);
  EXPECT_NEAR(simple[1], (mu + c) * e1, 1e-12);
}

TEST(SfpLegacy, ExponentControlsSlope) {
  RandomSource rng(8);
  const auto fit = fit_or_powerlaw(or_curve(sfp_legacy(1.0, 0.5, 100'000, rng)));
  EXPECT_NEAR(fit.rho, 2.0, 0.2);
}

TEST(SfpStar, UnitLagMatchesSimple) {
  // A lag draw of Exp = 0.5 rounds up to 1, so every step feeds back the
  // previous gap; interleave those with the gap draws sfp_simple sees.
  const auto gap_u = recorded_uniforms(41, 500);
  std::vector<double> star_u;
  for (double u : gap_u) {
    star_u.push_back(uniform_for_exponential(0.5));
    star_u.push_back(u);
  }
  ScriptedSource a(star_u), b(gap_u);
  EXPECT_EQ(as_vector(sfp_star(kE, 501, a)), as_vector(sfp_simple(kE, 501, b)));
}

TEST(SfpStar, EarlyLagFallsBackToFirstGap) {
  // Second gap with a lag of 3: reference is before the start, use delta_1.
  ScriptedSource src({uniform_for_exponential(2.5), uniform_for_exponential(1.0)});
  const auto s = sfp_star(kE, 2, src);
  EXPECT_NEAR(s[1], kE + 1.0, 1e-14);
}

TEST(SfpStar, StillPowerLawButLessCorrelated) {
  RandomSource a(12), b(12);
  const auto star = sfp_star(kE, 100'000, a);
  const auto simple = sfp_simple(kE, 100'000, b);
  EXPECT_NEAR(fit_or_powerlaw(or_curve(star)).rho, 1.0, 0.1);
  EXPECT_LT(lag1_pearson(star), lag1_pearson(simple));
}

TEST(DialOverhead, Shift) {
  const InterEventSeries s({1.0, 2.0, 3.0});
  EXPECT_EQ(as_vector(with_dial_overhead(s, 0.0)), as_vector(s));
  EXPECT_EQ(as_vector(with_dial_overhead(s, 10.0)), (std::vector<double>{11.0, 12.0, 13.0}));
  EXPECT_THROW(with_dial_overhead(s, -1.0), ParameterError);

  RandomSource rng(3);
  const auto big = with_dial_overhead(sfp_simple(kE, 100'000, rng), 10.0);
  EXPECT_GE(*std::min_element(big.begin(), big.end()), 10.0);
}

TEST(MultiRecipient, SingleRecipientIsIdentity) {
  const InterEventSeries s({3.0, 1.0, 4.0, 1.0, 5.0});
  ScriptedSource src({uniform_for_exponential(0.5)});
  const auto out = expand_multi_recipient(s, {}, src);
  EXPECT_EQ(as_vector(out), as_vector(s));
  EXPECT_EQ(src.consumed(), 5u);
}

TEST(MultiRecipient, ThreeCopies) {
  ScriptedSource src({uniform_for_exponential(2.5), uniform_for_exponential(1.0),
                      uniform_for_exponential(2.0)});
  const auto out = expand_multi_recipient(InterEventSeries({5.0}), {}, src);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], 5.0);
  EXPECT_NEAR(out[1], 1.0, 1e-12);
  EXPECT_NEAR(out[2], 1.0, 1e-12);
}

TEST(MultiRecipient, LengthNeverShrinks) {
  RandomSource rng(6);
  const auto base = sfp_simple(kE, 2000, rng);
  const auto out = expand_multi_recipient(base, {2.0, 1.0}, rng);
  EXPECT_GE(out.size(), base.size());
}

TEST(MultiRecipient, BendsShortGapEndOfOrCurve) {
  // Fit the line on the upper half of the curve and look at how far the
  // lowest percentile falls from it, with and without expansion.
  auto low_end_residual = [](const InterEventSeries& s) {
    const auto c = or_curve(s);
    std::vector<double> x, y;
    for (std::size_t i = 49; i < c.points.size(); ++i) {
      x.push_back(c.points[i].log_t);
      y.push_back(c.points[i].log_or);
    }
    const auto lf = ols(x, y);
    return c.points.front().log_or - lf.predict(c.points.front().log_t);
  };
  RandomSource a(55), b(56);
  const auto base = sfp_simple(600.0, 50'000, a);
  const auto expanded = expand_multi_recipient(base, {2.0, 1.0}, b);
  EXPECT_LT(std::abs(low_end_residual(base)), 0.3);
  EXPECT_GT(std::abs(low_end_residual(expanded)), 1.0);
}

TEST(Poisson, MeanAndWhiteness) {
  RandomSource rng(100);
  const auto s = poisson_process(4.0, 1'000'000, rng);
  EXPECT_NEAR(mean(s.deltas()) / 4.0, 1.0, 0.01);

  RandomSource small(101);
  const auto acf = autocorrelation(poisson_process(4.0, 10'000, small), 1);
  EXPECT_LT(std::abs(acf.coefficients[0]), acf.band);
}

TEST(Poisson, ForcedDrawsGiveConstantSeries) {
  ScriptedSource src({uniform_for_exponential(1.0)});
  for (double d : poisson_process(2.5, 20, src)) EXPECT_NEAR(d, 2.5, 1e-15);
}

TEST(Timestamps, PrefixSums) {
  EXPECT_TRUE(intervals_to_timestamps(InterEventSeries{}).empty());
  const auto ev = intervals_to_timestamps(InterEventSeries({1.0, 2.0, 3.0}));
  EXPECT_EQ(std::vector<double>(ev.timestamps().begin(), ev.timestamps().end()),
            (std::vector<double>{1.0, 3.0, 6.0}));
  const auto shifted = intervals_to_timestamps(InterEventSeries({1.0}), 100.0);
  EXPECT_EQ(shifted.timestamps()[0], 101.0);
}

TEST(Timestamps, RoundTripWithInterEventTimes) {
  // Dyadic gaps make every prefix sum exact.
  const std::vector<double> gaps{0.5, 0.25, 3.0, 1.125, 8.0};
  const auto back = inter_event_times(intervals_to_timestamps(InterEventSeries(gaps), 0.0));
  // The first event sits at t0 + delta_1; the recovered gaps start at delta_2.
  EXPECT_EQ(as_vector(back), std::vector<double>(gaps.begin() + 1, gaps.end()));

  RandomSource rng(4);
  const auto s = sfp_simple(kE, 10'000, rng);
  const auto r = inter_event_times(intervals_to_timestamps(s));
  // Differences of rounded prefix sums are exact up to the rounding of the
  // two sums involved.
  const auto t = intervals_to_timestamps(s);
  for (std::size_t k = 0; k < r.size(); ++k)
    EXPECT_NEAR(r[k], s[k + 1], 2.0 * std::numeric_limits<double>::epsilon() * t.timestamps()[k + 1]);
}

TEST(Generators, MarkovPropertyNormalizedGapsAreUnitExponential) {
  // Given the previous gap, delta_k / (delta_{k-1} + mu/e) is Exp(1). Check
  // mean and coefficient of variation inside each decile of the previous gap.
  RandomSource rng(2718);
  const double mu = kE;
  const auto s = as_vector(sfp_simple(mu, 1'000'000, rng));
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 1; k < s.size(); ++k) pairs.emplace_back(s[k - 1], s[k] / (s[k - 1] + mu / kE));
  std::sort(pairs.begin(), pairs.end());
  const std::size_t per = pairs.size() / 10;
  for (std::size_t b = 0; b < 10; ++b) {
    std::vector<double> v;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) v.push_back(pairs[i].second);
    const auto mv = sfp::testing::sample_moments(v);
    EXPECT_NEAR(mv[0], 1.0, 0.02) << "decile " << b;
    EXPECT_NEAR(std::sqrt(mv[1]) / mv[0], 1.0, 0.03) << "decile " << b;
  }
}

TEST(Generators, ConditionalMeanIncreasesWithPreviousGap) {
  RandomSource rng(19);
  const auto s = as_vector(sfp_simple(kE, 100'000, rng));
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 1; k < s.size(); ++k) pairs.emplace_back(s[k - 1], s[k]);
  std::sort(pairs.begin(), pairs.end());
  const std::size_t per = pairs.size() / 10;
  double prev = 0.0;
  for (std::size_t b = 0; b < 10; ++b) {
    double sum = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) sum += pairs[i].second;
    const double m = sum / static_cast<double>(per);
    EXPECT_GT(m, prev) << "decile " << b;
    prev = m;
  }
}

TEST(Generators, NonCollapse) {
  RandomSource rng(1);
  const auto s = as_vector(sfp_simple(kE, 1'000'000, rng));
  std::vector<double> tail(s.end() - 100'000, s.end());
  std::sort(tail.begin(), tail.end());
  EXPECT_GT(percentile_sorted(tail, 0.01), kE / 1000.0);
}

TEST(Generators, ShortTermPoissonBehavior) {
  // Every gap is exponential around its own running mean beta_k =
  // delta_{k-1} + mu/e. Windows of 50 gaps scaled by beta_k should pass a
  // KS test against Exp(1) at the 1% level about 99% of the time.
  RandomSource rng(64);
  const double mu = kE;
  const auto s = as_vector(sfp_simple(mu, 200'001, rng));
  const double critical = 1.63 / std::sqrt(50.0);
  std::size_t windows = 0, rejected = 0;
  for (std::size_t w = 1; w + 50 <= s.size(); w += 50, ++windows) {
    std::vector<double> z;
    for (std::size_t i = w; i < w + 50; ++i) z.push_back(s[i] / (s[i - 1] + mu / kE));
    std::sort(z.begin(), z.end());
    double d = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double f = -std::expm1(-z[j]);
      d = std::max({d, f - j / 50.0, (j + 1) / 50.0 - f});
    }
    rejected += d > critical;
  }
  EXPECT_EQ(windows, 4000u);
  EXPECT_LE(static_cast<double>(rejected) / windows, 0.02);
}

TEST(Generators, SeedDeterminism) {
  auto twice = [](auto gen) {
    RandomSource a(90), b(90);
    return as_vector(gen(a)) == as_vector(gen(b));
  };
  EXPECT_TRUE(twice([](RandomSource& r) { return sfp_simple(kE, 1000, r); }));
  EXPECT_TRUE(twice([](RandomSource& r) { return sfp_general(kE, 1.4, 1000, r); }));
  EXPECT_TRUE(twice([](RandomSource& r) { return sfp_legacy(2.0, 0.8, 1000, r); }));
  EXPECT_TRUE(twice([](RandomSource& r) { return sfp_star(kE, 1000, r); }));
  EXPECT_TRUE(twice([](RandomSource& r) { return poisson_process(3.0, 1000, r); }));
  EXPECT_TRUE(twice([](RandomSource& r) {
    return expand_multi_recipient(sfp_simple(kE, 1000, r), {}, r);
  }));
}

TEST(Generators, ConfigDispatch) {
  SfpConfig cfg;
  cfg.mu = kE;
  cfg.n = 200;
  cfg.theta = 5.0;
  cfg.round_up = true;
  RandomSource a(7), b(7);
  const auto out = generate(cfg, a);
  const auto ref = round_up(with_dial_overhead(sfp_simple(kE, 200, b), 5.0));
  EXPECT_EQ(as_vector(out), as_vector(ref));
  for (double d : out) {
    EXPECT_GE(d, 5.0);
    EXPECT_EQ(d, std::ceil(d));
  }

  cfg = {};
  cfg.n = 50;
  cfg.variant = variant::Poisson{2.0};
  RandomSource c(7), d(7);
  EXPECT_EQ(as_vector(generate(cfg, c)), as_vector(poisson_process(2.0, 50, d)));
}

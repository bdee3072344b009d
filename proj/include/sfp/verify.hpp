#pragma once

// Machine-readable battery of stationary-law and calibration checks, emitted
// by `sfp verify`. Each check records its measured value next to the bound
// it is held to.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfp/analysis.hpp"
#include "sfp/distributions.hpp"
#include "sfp/generators.hpp"
#include "sfp/quadrature.hpp"
#include "sfp/random.hpp"
#include "sfp/temporal.hpp"

namespace sfp {

struct CheckResult {
  std::string name;
  bool pass = false;
  nlohmann::json detail;
};

struct VerifyOptions {
  bool fast = false;
  std::uint64_t seed = 1;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"fast", options.fast}, {"seed", options.seed}, {"pass", all_pass()}, {"checks", arr}};
  }
};

namespace detail {

inline CheckResult check_llg_normalization() {
  const LogLogisticParams p(std::numbers::e, 1.0);
  // Integrate in log space: int pdf(x) dx = int pdf(e^s) e^s ds.
  auto f = [&](double s) {
    const double x = std::exp(s);
    return llg_pdf(x, p) * x;
  };
  const double v = integrate_adaptive(f, std::log(1e-12), std::log(1e8)).value;
  return {"llg_pdf_normalization", std::abs(v - 1.0) <= 1e-4,
          {{"integral", v}, {"tolerance", 1e-4}}};
}

inline CheckResult check_c_mu(const VerifyOptions& o) {
  RandomSource rng = RandomSource(o.seed).derive(1);
  const auto cs = log_space(1.0, 1e4, 20);
  const std::size_t samples = o.fast ? 20'000 : 100'000;
  const auto cal = calibrate_c_mu(cs, samples, rng);
  const bool ok = cal.fit.slope >= 2.62 && cal.fit.slope <= 2.82 && cal.intercept_ci.contains(0.0);
  return {"calibrate_c_mu", ok,
          {{"slope", cal.fit.slope},
           {"intercept", cal.fit.intercept},
           {"intercept_ci", {cal.intercept_ci.lo, cal.intercept_ci.hi}},
           {"slope_bounds", {2.62, 2.82}},
           {"samples_per_point", samples}}};
}

inline CheckResult check_a_rho(const VerifyOptions& o) {
  RandomSource rng = RandomSource(o.seed).derive(2);
  const std::vector<double> as = o.fast ? std::vector<double>{0.5, 1.0, 2.0}
                                        : std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  const auto pts = calibrate_a_rho(as, o.fast ? 20'000 : 100'000, rng);
  bool ok = true;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) {
    ok = ok && p.within_tolerance;
    arr.push_back({{"a", p.a}, {"fitted_rho", p.fitted_rho}, {"target", 1.0 / p.a}});
  }
  return {"calibrate_a_rho", ok, {{"points", arr}, {"relative_tolerance", 0.1}}};
}

inline CheckResult check_moments() {
  const auto half = stationary_moments(0.5, 1.0);
  const auto unit = stationary_moments(1.0, 1.0);
  const auto high = stationary_moments(0.8, 1.0);
  const bool ok = std::abs(half.mean - 2.0) < 1e-12 && half.variance &&
                  std::abs(*half.variance - 8.0) < 1e-12 && std::isinf(unit.mean) &&
                  !high.variance;
  return {"stationary_moments", ok,
          {{"mean_alpha_0.5", half.mean},
           {"variance_alpha_0.5", half.variance.value_or(NAN)},
           {"mean_alpha_1_infinite", std::isinf(unit.mean)},
           {"variance_alpha_0.8_defined", high.variance.has_value()}}};
}

inline CheckResult check_markov() {
  const MarkovChainSpec spec{2000, 1.0};
  const auto pi = stationary_distribution(markov_transition_matrix(spec));
  const auto q = discretized_llg(spec.n_states, LogLogisticParams(std::numbers::e * spec.c, 1.0));
  const double tv = total_variation(pi, q);
  return {"markov_stationary_vs_llg", tv <= 0.05,
          {{"total_variation", tv}, {"bound", 0.05}, {"n_states", spec.n_states}}};
}

inline CheckResult check_quadrature() {
  double worst = 0.0;
  nlohmann::json per_mu = nlohmann::json::array();
  for (double mu : {std::numbers::e, 100.0, 1e4}) {
    double w = 0.0;
    for (double x : log_space(mu / 100.0, 100.0 * mu, 20)) {
      const double ref = llg_pdf(x, LogLogisticParams(mu, 1.0));
      w = std::max(w, std::abs(sfp_pdf_integral(x, mu) - ref) / ref);
    }
    worst = std::max(worst, w);
    per_mu.push_back({{"mu", mu}, {"max_relative_error", w}});
  }
  return {"sfp_pdf_integral_vs_llg", worst <= 1e-2,
          {{"max_relative_error", worst}, {"bound", 1e-2}, {"per_mu", per_mu}}};
}

inline CheckResult check_tail(const VerifyOptions& o) {
  const std::size_t n = o.fast ? 50'000 : 100'000;
  bool ok = true;
  nlohmann::json arr = nlohmann::json::array();
  for (double rho : {1.0, 2.0}) {
    RandomSource rng = RandomSource(o.seed).derive(rho == 1.0 ? 3 : 4);
    const auto t = tail_exponent_check(sfp_general(std::numbers::e, rho, n, rng), rho);
    ok = ok && t.pass;
    arr.push_back({{"rho", rho}, {"alpha_hat", t.alpha_hat}, {"expected", t.expected},
                   {"xmin", t.tail.xmin}, {"n_tail", t.tail.n_tail}});
  }
  return {"tail_exponent", ok, {{"points", arr}, {"tolerance", kTailTolerance}}};
}

inline CheckResult check_non_collapse(const VerifyOptions& o) {
  const std::size_t n = o.fast ? 200'000 : 1'000'000;
  RandomSource rng = RandomSource(o.seed).derive(5);
  const double mu = std::numbers::e;
  auto gaps = std::move(sfp_simple(mu, n, rng)).release();
  std::vector<double> tail(gaps.end() - 100'000, gaps.end());
  std::sort(tail.begin(), tail.end());
  const double p1 = percentile_sorted(tail, 0.01);
  return {"non_collapse", p1 > mu / 1000.0, {{"p1_last_1e5", p1}, {"bound", mu / 1000.0}}};
}

inline CheckResult check_correlation(const VerifyOptions& o) {
  const RandomSource root(o.seed);
  RandomSource a = root.derive(6), b = root.derive(7);
  const std::size_t n = 100'000;
  const double r_sfp = lag1_pearson(sfp_simple(std::numbers::e, n, a));
  const double r_star = lag1_pearson(sfp_star(std::numbers::e, n, b));
  const bool ok = std::abs(r_sfp - 0.7) <= 0.1 && std::abs(r_star - 0.43) <= 0.1;
  return {"lag1_correlation", ok,
          {{"sfp", r_sfp}, {"sfp_star", r_star}, {"targets", {0.7, 0.43}}, {"tolerance", 0.1}}};
}

}  // namespace detail

inline VerifyReport run_verification(const VerifyOptions& o) {
  VerifyReport r;
  r.options = o;
  r.checks.push_back(detail::check_llg_normalization());
  r.checks.push_back(detail::check_c_mu(o));
  r.checks.push_back(detail::check_a_rho(o));
  r.checks.push_back(detail::check_moments());
  r.checks.push_back(detail::check_markov());
  r.checks.push_back(detail::check_quadrature());
  r.checks.push_back(detail::check_tail(o));
  r.checks.push_back(detail::check_non_collapse(o));
  r.checks.push_back(detail::check_correlation(o));
  return r;
}

}  // namespace sfp

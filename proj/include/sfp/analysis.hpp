#pragma once

// Checks on the stationary behavior of the self-feeding process: parameter
// calibration sweeps, moment recursions of the linear Wold chain, the
// discretized Markov chain, the stationary-density integral and tail
// exponents.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "sfp/distributions.hpp"
#include "sfp/errors.hpp"
#include "sfp/fitting.hpp"
#include "sfp/generators.hpp"
#include "sfp/quadrature.hpp"
#include "sfp/random.hpp"
#include "sfp/stats.hpp"

namespace sfp {

// -- calibration sweeps ----------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

struct CalibrationFit {
  LinearFit fit;                // median = intercept + slope * C
  Interval slope_ci;            // 95%
  Interval intercept_ci;        // 95%
  std::vector<double> medians;  // one per C value
};

/// Runs sfp_legacy(C, a = 1) at every C (point i on stream rng.derive(i + 1)),
/// records the empirical median of the gaps and regresses median on C.
inline CalibrationFit calibrate_c_mu(std::span<const double> c_values,
                                     std::size_t samples_per_point, RandomSource& rng) {
  if (c_values.size() < 10)
    throw InsufficientDataError("calibrate_c_mu: need at least 10 C values");
  const auto [lo, hi] = std::minmax_element(c_values.begin(), c_values.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0)
    throw ParameterError("calibrate_c_mu: C values must be positive and span two decades");
  if (samples_per_point < 2) throw ParameterError("calibrate_c_mu: too few samples");

  CalibrationFit out;
  out.medians.reserve(c_values.size());
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    RandomSource stream = rng.derive(i + 1);
    auto gaps = sfp_legacy(c_values[i], 1.0, samples_per_point, stream);
    out.medians.push_back(median(std::move(gaps).release()));
  }
  out.fit = ols(c_values, out.medians);
  const boost::math::students_t t_dist(static_cast<double>(c_values.size() - 2));
  const double t = boost::math::quantile(t_dist, 0.975);
  out.slope_ci = {out.fit.slope - t * out.fit.slope_se, out.fit.slope + t * out.fit.slope_se};
  out.intercept_ci = {out.fit.intercept - t * out.fit.intercept_se,
                      out.fit.intercept + t * out.fit.intercept_se};
  return out;
}

/// `count` values log-spaced over [lo, hi].
inline std::vector<double> log_space(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw ParameterError("log_space: bad range");
  std::vector<double> v(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

struct ShapeCalibrationPoint {
  double a = 0.0;
  double fitted_rho = 0.0;
  bool within_tolerance = false;  // |fitted_rho - 1/a| <= 0.1 / a
};

inline std::vector<ShapeCalibrationPoint> calibrate_a_rho(std::span<const double> a_values,
                                                          std::size_t samples_per_point,
                                                          RandomSource& rng, double c = 1.0) {
  std::vector<ShapeCalibrationPoint> out;
  out.reserve(a_values.size());
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    const double a = a_values[i];
    if (!(a >= 0.1 && a <= 2.0)) throw ParameterError("calibrate_a_rho: a must lie in [0.1, 2]");
    RandomSource stream = rng.derive(i + 1);
    const auto fit = fit_or_powerlaw(or_curve(sfp_legacy(c, a, samples_per_point, stream)));
    const double target = 1.0 / a;
    out.push_back({a, fit.rho, std::abs(fit.rho - target) <= 0.1 * target});
  }
  return out;
}

// -- moment recursions -----------------------------------------------------

/// Stationary moments of the chain E(delta_t | delta_{t-1}) = alpha delta_{t-1} + c
/// with exponential conditionals.
struct MomentReport {
  double alpha = 1.0;
  double c = 0.0;
  double mean = std::numeric_limits<double>::infinity();  // infinite iff alpha == 1
  std::optional<double> variance;                          // defined iff alpha < 1/sqrt(2)
};

inline MomentReport stationary_moments(double alpha, double c) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError("stationary_moments: alpha must lie in (0, 1]");
  if (!(c > 0.0)) throw ParameterError("stationary_moments: c must be positive");
  MomentReport r;
  r.alpha = alpha;
  r.c = c;
  if (alpha < 1.0) r.mean = c / (1.0 - alpha);
  if (alpha < 1.0 / std::numbers::sqrt2) r.variance = r.mean * r.mean / (1.0 - 2.0 * alpha * alpha);
  return r;
}

// -- discretized Markov chain ---------------------------------------------

struct MarkovChainSpec {
  std::size_t n_states = 2000;
  double c = 1.0;  // location constant, mu / e
};

/// Default state count: 2000, or ceil(50 * mu) when that is larger.
inline std::size_t default_state_count(double c) {
  const double want = std::ceil(50.0 * std::numbers::e * c);
  return std::max<std::size_t>(2000, static_cast<std::size_t>(want));
}

/// Dense row-major stochastic matrix.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// State i (1-based) holds gaps in (i-1, i]. From state i the next gap is
/// exponential with mean i + C; p_ij = F(j) - F(j-1) for j < n and the last
/// state takes 1 - F(n-1), so every row sums to one.
inline TransitionMatrix markov_transition_matrix(const MarkovChainSpec& spec) {
  if (spec.n_states < 2) throw ParameterError("markov chain needs at least 2 states");
  if (!(spec.c > 0.0)) throw ParameterError("markov chain needs C > 0");
  const std::size_t n = spec.n_states;
  TransitionMatrix p(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double beta = static_cast<double>(i) + spec.c;
    const double step = -std::expm1(-1.0 / beta);  // 1 - e^{-1/beta}
    for (std::size_t j = 1; j < n; ++j)
      p(i - 1, j - 1) = std::exp(-static_cast<double>(j - 1) / beta) * step;
    p(i - 1, n - 1) = std::exp(-static_cast<double>(n - 1) / beta);
  }
  return p;
}

struct StationaryOptions {
  double tol = 1e-10;  // L1 change between iterates
  std::size_t max_iterations = 1'000'000;
};

/// Power iteration pi <- pi P from the uniform start.
inline std::vector<double> stationary_distribution(const TransitionMatrix& p,
                                                   StationaryOptions opts = {}) {
  const std::size_t n = p.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = pi[i];
      if (w == 0.0) continue;
      const auto r = p.row(i);
      for (std::size_t j = 0; j < n; ++j) next[j] += w * r[j];
    }
    double total = 0.0, change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      total += next[j];
      change += std::abs(next[j] - pi[j]);
    }
    for (double& v : next) v /= total;
    pi.swap(next);
    if (change < opts.tol) return pi;
  }
  throw NumericError("stationary_distribution: power iteration did not converge");
}

/// Log-logistic mass of the Markov states: (j-1, j] for j < n, (n-1, inf) last.
inline std::vector<double> discretized_llg(std::size_t n_states, const LogLogisticParams& p) {
  std::vector<double> q(n_states);
  double prev = 0.0;
  for (std::size_t j = 1; j < n_states; ++j) {
    const double f = llg_cdf(static_cast<double>(j), p);
    q[j - 1] = f - prev;
    prev = f;
  }
  q[n_states - 1] = 1.0 - prev;
  return q;
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// -- stationary density integral ------------------------------------------

/// f(x) = int_0^inf llg_pdf(y; rho = 1, mu) exp(-x / (y + c)) / (y + c) dy with
/// c = mu / e: one transition of the chain applied to a log-logistic state.
/// Integrated on u in (0,1) with y = mu u / (1 - u).
inline double sfp_pdf_integral(double x, double mu, double quad_tol = 1e-12) {
  if (!(x > 0.0)) throw DomainError("sfp_pdf_integral: x must be positive");
  const LogLogisticParams p(mu, 1.0);
  const double c = mu / std::numbers::e;
  auto integrand = [&](double u) {
    const double w = 1.0 - u;
    if (!(w > 0.0)) return 0.0;
    const double y = mu * u / w;
    const double jac = mu / (w * w);
    const double dens = y > 0.0 ? llg_pdf(y, p) : 1.0 / mu;
    const double s = y + c;
    return dens * jac * std::exp(-x / s) / s;
  };
  // For large x the mass sits near y ~ x, squeezed against u = 1; without
  // breakpoints there the first Kronrod pass can see only zeros.
  std::vector<double> cuts{0.0};
  for (double y : {0.1 * x, x, 10.0 * x}) {
    const double u = y / (y + mu);
    if (u > cuts.back() && u < 1.0) cuts.push_back(u);
  }
  cuts.push_back(1.0);
  QuadratureOptions q;
  q.abs_tol = quad_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_adaptive(integrand, cuts[i], cuts[i + 1], q).value;
  return total;
}

// -- tail exponent ---------------------------------------------------------

struct TailCheck {
  double alpha_hat = 0.0;
  double expected = 0.0;  // 1 + rho
  PowerLawTail tail;
  bool pass = false;
};

inline constexpr double kTailTolerance = 0.15;

/// Fits the density exponent of the tail and compares it with 1 + rho.
inline TailCheck tail_exponent_check(const InterEventSeries& d, double expected_rho,
                                     double tolerance = kTailTolerance) {
  if (d.size() < 10'000) throw InsufficientDataError("tail_exponent_check: need >= 1e4 gaps");
  TailCheck r;
  r.tail = fit_powerlaw_mle(d);
  r.alpha_hat = r.tail.alpha;
  r.expected = 1.0 + expected_rho;
  r.pass = std::abs(r.alpha_hat - r.expected) <= tolerance;
  return r;
}

}  // namespace sfp

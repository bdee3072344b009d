#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sfp/errors.hpp"
#include "sfp/fitting.hpp"
#include "sfp/series.hpp"

namespace sfp {

/// Sample autocorrelation at lags 1..L with the 95% white-noise half-width.
struct AcfResult {
  std::vector<double> coefficients;  // coefficients[l-1] = AC_l
  double band = 0.0;                 // 1.96 / sqrt(n)
  std::size_t n = 0;
};

namespace detail {

inline std::vector<double> maybe_log(const InterEventSeries& d, bool log_space) {
  std::vector<double> v(d.begin(), d.end());
  if (log_space)
    for (double& x : v) x = std::log(x);
  return v;
}

}  // namespace detail

inline AcfResult autocorrelation(const InterEventSeries& d, std::size_t max_lag,
                                 bool log_space = false) {
  if (max_lag < 1) throw ParameterError("autocorrelation: max_lag must be >= 1");
  if (d.size() <= max_lag)
    throw InsufficientDataError("autocorrelation: series shorter than max_lag + 1");
  const auto v = detail::maybe_log(d, log_space);
  const std::size_t n = v.size();
  const double m = mean(v);
  double denom = 0.0;
  for (double x : v) denom += (x - m) * (x - m);
  if (!(denom > 0.0)) throw DegenerateDataError("autocorrelation: zero variance");

  AcfResult r;
  r.n = n;
  r.band = 1.96 / std::sqrt(static_cast<double>(n));
  r.coefficients.reserve(max_lag);
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double num = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) num += (v[t] - m) * (v[t + lag] - m);
    r.coefficients.push_back(num / denom);
  }
  return r;
}

/// One-sided H1 test: AC_1 above the white-noise band.
inline bool test_h1(const AcfResult& acf) {
  return !acf.coefficients.empty() && acf.coefficients.front() > acf.band;
}

/// Pearson correlation of consecutive pairs (Delta_{k-1}, Delta_k).
inline double lag1_pearson(const InterEventSeries& d, bool log_space = true) {
  if (d.size() < 3) throw InsufficientDataError("lag1_pearson: need at least 3 gaps");
  const auto v = detail::maybe_log(d, log_space);
  const std::size_t m = v.size() - 1;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += v[k];
    my += v[k + 1];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double a = v[k] - mx, b = v[k + 1] - my;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateDataError("lag1_pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

/// Bin [lo, hi) of event counts and the share of its individuals with h1.
struct H1Bin {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t count = 0;
  std::optional<double> proportion;  // empty when the bin has no individuals
};

inline std::vector<H1Bin> h1_proportion_by_count(std::span<const FitResult> results,
                                                 std::span<const std::size_t> bin_edges) {
  if (results.empty()) throw InsufficientDataError("h1_proportion_by_count: no results");
  if (bin_edges.size() < 2) throw ParameterError("h1_proportion_by_count: need >= 2 edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i)
    if (!(bin_edges[i] > bin_edges[i - 1]))
      throw ParameterError("h1_proportion_by_count: edges must increase");

  std::vector<H1Bin> bins;
  std::vector<std::size_t> hits(bin_edges.size() - 1, 0);
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i)
    bins.push_back({bin_edges[i], bin_edges[i + 1], 0, std::nullopt});
  for (const auto& r : results) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (r.n >= bins[i].lo && r.n < bins[i].hi) {
        ++bins[i].count;
        if (r.h1) ++hits[i];
        break;
      }
    }
  }
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (bins[i].count > 0)
      bins[i].proportion = static_cast<double>(hits[i]) / static_cast<double>(bins[i].count);
  return bins;
}

// -- per-individual pipeline ----------------------------------------------

struct FitOptions {
  std::size_t min_points = kDefaultMinEvents;
  std::size_t max_lag = 1;
  bool log_space_acf = false;
};

/// Gaps -> OR curve -> power-law fit, plus the lag-1 dependence test.
inline FitResult fit_individual(std::string individual_id, const InterEventSeries& gaps,
                                const FitOptions& opts = {}) {
  const OrFit of = fit_or_powerlaw(or_curve(gaps, opts.min_points));
  const AcfResult acf = autocorrelation(gaps, std::max<std::size_t>(opts.max_lag, 1),
                                        opts.log_space_acf);
  FitResult r;
  r.individual_id = std::move(individual_id);
  r.rho = of.rho;
  r.mu = of.mu;
  r.r2 = of.r2;
  r.n = gaps.size() + 1;
  r.ac1 = acf.coefficients.front();
  r.h1 = test_h1(acf);
  return r;
}

inline FitResult fit_individual(const EventSeries& ev, const FitOptions& opts = {}) {
  return fit_individual(ev.individual_id(), inter_event_times(ev), opts);
}

}  // namespace sfp

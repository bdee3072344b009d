#pragma once

// Per-individual characterization of an inter-event time distribution:
// empirical percentiles, the odds-ratio curve and its log-log regression,
// plus the power-law and exponential baselines it is compared against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sfp/distributions.hpp"
#include "sfp/errors.hpp"
#include "sfp/series.hpp"
#include "sfp/stats.hpp"

namespace sfp {

inline constexpr std::size_t kDefaultMinEvents = 30;

inline InterEventSeries inter_event_times(std::span<const double> timestamps) {
  if (timestamps.size() < 2)
    throw InsufficientDataError("need at least two events to form a gap");
  std::vector<double> out;
  out.reserve(timestamps.size() - 1);
  for (std::size_t k = 1; k < timestamps.size(); ++k) {
    const double d = timestamps[k] - timestamps[k - 1];
    if (!(d > 0.0)) throw DataError("timestamps are not strictly increasing");
    out.push_back(d);
  }
  return InterEventSeries(std::move(out));
}

inline InterEventSeries inter_event_times(const EventSeries& ev) {
  return inter_event_times(ev.timestamps());
}

/// What to do with zero gaps, which appear in logs recorded at whole-second
/// resolution.
enum class ZeroGapPolicy { drop, jitter };

/// Builds a valid InterEventSeries from raw gaps. Zeros are dropped or
/// replaced by half a time unit; negative gaps are rejected.
inline InterEventSeries sanitize_gaps(std::vector<double> raw,
                                      ZeroGapPolicy policy = ZeroGapPolicy::drop) {
  std::vector<double> out;
  out.reserve(raw.size());
  for (double d : raw) {
    if (d < 0.0 || !std::isfinite(d)) throw DataError("negative or non-finite gap");
    if (d == 0.0) {
      if (policy == ZeroGapPolicy::jitter) out.push_back(0.5);
      continue;
    }
    out.push_back(d);
  }
  return InterEventSeries(std::move(out));
}

// -- odds-ratio curve ------------------------------------------------------

struct OrPoint {
  double log_t = 0.0;
  double log_or = 0.0;
};

/// (ln t_q, ln OR(t_q)) for percentiles q = 1..99. P100 is left out because
/// its odds ratio is infinite.
struct OrCurve {
  std::vector<OrPoint> points;
};

inline OrCurve or_curve(const InterEventSeries& d, std::size_t min_points = kDefaultMinEvents) {
  if (d.size() < min_points || d.size() < 2)
    throw InsufficientDataError("or_curve: " + std::to_string(d.size()) +
                                " gaps, need at least " + std::to_string(min_points));
  std::vector<double> sorted(d.begin(), d.end());
  std::sort(sorted.begin(), sorted.end());
  OrCurve c;
  c.points.reserve(99);
  for (int q = 1; q <= 99; ++q) {
    const double t = percentile_sorted(sorted, q / 100.0);
    if (!(t > 0.0)) throw DataError("or_curve: nonpositive percentile");
    c.points.push_back({std::log(t), std::log(static_cast<double>(q) / (100 - q))});
  }
  return c;
}

/// Result of regressing log OR on log t.
struct OrFit {
  double rho = 0.0;        // slope
  double mu = 0.0;         // exp(-intercept / rho): where the line crosses OR = 1
  double r2 = 0.0;
  double intercept = 0.0;
};

inline OrFit fit_or_powerlaw(const OrCurve& c) {
  if (c.points.size() < 10)
    throw InsufficientDataError("fit_or_powerlaw: need at least 10 curve points");
  std::vector<double> x, y;
  x.reserve(c.points.size());
  y.reserve(c.points.size());
  for (const auto& p : c.points) {
    x.push_back(p.log_t);
    y.push_back(p.log_or);
  }
  const LinearFit lf = ols(x, y);
  OrFit f;
  f.rho = lf.slope;
  f.intercept = lf.intercept;
  f.r2 = lf.r2;
  f.mu = std::exp(-lf.intercept / lf.slope);
  return f;
}

/// Per-individual summary. ac1 and h1 come from the temporal analysis.
struct FitResult {
  std::string individual_id;
  double rho = 0.0;
  double mu = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;  // number of events (gaps + 1)
  double ac1 = 0.0;
  bool h1 = false;

  double log_mu() const { return std::log(mu); }
};

// -- power-law tail (continuous MLE, KS-selected xmin) ---------------------

struct PowerLawTail {
  double alpha = 0.0;  // density exponent: p(x) ~ x^{-alpha}
  double xmin = 0.0;
  double ks = 0.0;     // KS distance of the tail fit at the chosen xmin
  std::size_t n_tail = 0;
};

struct PowerLawOptions {
  std::size_t min_tail = 20;
  // Upper bound on the xmin candidates scanned; candidates are spread evenly
  // over the distinct observed values.
  std::size_t max_candidates = 400;
};

inline PowerLawTail fit_powerlaw_mle(const InterEventSeries& d, PowerLawOptions opts = {}) {
  if (d.size() < 50) throw InsufficientDataError("fit_powerlaw_mle: need at least 50 gaps");
  std::vector<double> xs(d.begin(), d.end());
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n < opts.min_tail) throw InsufficientDataError("fit_powerlaw_mle: tail too small");

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(xs[i]);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  // First index of every distinct value that leaves at least min_tail points.
  std::vector<std::size_t> starts;
  const std::size_t last = n - opts.min_tail;
  for (std::size_t i = 0; i <= last; ++i) {
    if (i == 0 || xs[i] != xs[i - 1]) starts.push_back(i);
  }
  std::vector<std::size_t> candidates;
  if (starts.size() <= opts.max_candidates) {
    candidates = starts;
  } else {
    const double step = static_cast<double>(starts.size() - 1) / (opts.max_candidates - 1);
    for (std::size_t k = 0; k < opts.max_candidates; ++k)
      candidates.push_back(starts[static_cast<std::size_t>(std::llround(k * step))]);
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }

  PowerLawTail best;
  best.ks = std::numeric_limits<double>::infinity();
  for (std::size_t i : candidates) {
    const std::size_t m = n - i;
    const double lx = logs[i];
    const double sum = suffix[i] - static_cast<double>(m) * lx;
    if (!(sum > 0.0)) continue;
    const double alpha = 1.0 + static_cast<double>(m) / sum;
    double ks = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double model = 1.0 - std::exp((1.0 - alpha) * (logs[i + j] - lx));
      const double lo = static_cast<double>(j) / m;
      const double hi = static_cast<double>(j + 1) / m;
      ks = std::max(ks, std::max(std::abs(model - lo), std::abs(hi - model)));
    }
    if (ks < best.ks) best = {alpha, xs[i], ks, m};
  }
  if (best.n_tail == 0) throw InsufficientDataError("fit_powerlaw_mle: no usable tail");
  return best;
}

inline ExponentialParams fit_exponential(const InterEventSeries& d) {
  if (d.size() < 2) throw InsufficientDataError("fit_exponential: need at least two gaps");
  return ExponentialParams(mean(d.deltas()));
}

}  // namespace sfp

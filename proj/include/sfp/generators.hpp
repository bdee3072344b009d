#pragma once

// Self-feeding process generators and the Poisson baseline.
//
// Every generator draws from a UniformSource in a fixed order, so a seeded
// RandomSource reproduces its output bit for bit:
//   sfp_simple / sfp_general / sfp_legacy / poisson_process: one uniform per
//     emitted gap after the first;
//   sfp_star: per gap after the first, one uniform for the lag, then one for
//     the gap;
//   expand_multi_recipient: per input event, one uniform for the recipient
//     count, then one per extra copy for its delay.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "sfp/distributions.hpp"
#include "sfp/errors.hpp"
#include "sfp/random.hpp"
#include "sfp/series.hpp"

namespace sfp {

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ParameterError(std::string(what) + " must be positive");
}

inline void require_count(std::size_t n) {
  if (n < 1) throw ParameterError("event count must be at least 1");
}

// Keeps power transforms of tiny chain values strictly positive.
inline double positive_floor(double v) {
  return v > 0.0 ? v : std::numeric_limits<double>::min();
}

}  // namespace detail

/// Incremental form of the generalized chain: delta_1 = mu,
/// delta_t ~ Exp(mean delta_{t-1} + mu^rho / e), output delta_t^{1/rho}.
/// Used where the number of gaps is not known up front.
class SfpChain {
 public:
  SfpChain(double mu, double rho)
      : inv_rho_(1.0 / rho),
        feed_(std::pow(mu, rho) / std::numbers::e),
        state_(mu),
        unit_power_(rho == 1.0) {
    detail::require_positive(mu, "mu");
    detail::require_positive(rho, "rho");
  }

  /// Returns the next gap. The first call yields the seed value.
  template <UniformSource G>
  double next(G& rng) {
    if (started_) state_ = (state_ + feed_) * unit_exponential(rng);
    started_ = true;
    const double gap = unit_power_ ? state_ : std::pow(state_, inv_rho_);
    return detail::positive_floor(gap);
  }

 private:
  double inv_rho_;
  double feed_;
  double state_;
  bool unit_power_;
  bool started_ = false;
};

/// One-parameter model: delta_1 = mu, delta_k ~ Exp(mean delta_{k-1} + mu/e).
template <UniformSource G>
InterEventSeries sfp_simple(double mu, std::size_t n, G& rng) {
  detail::require_positive(mu, "mu");
  detail::require_count(n);
  const double feed = mu / std::numbers::e;
  std::vector<double> out;
  out.reserve(n);
  double prev = mu;
  out.push_back(prev);
  for (std::size_t k = 1; k < n; ++k) {
    prev = detail::positive_floor((prev + feed) * unit_exponential(rng));
    out.push_back(prev);
  }
  return InterEventSeries(std::move(out));
}

/// Two-parameter model; at rho = 1 this reproduces sfp_simple draw for draw.
template <UniformSource G>
InterEventSeries sfp_general(double mu, double rho, std::size_t n, G& rng) {
  detail::require_count(n);
  SfpChain chain(mu, rho);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(chain.next(rng));
  return InterEventSeries(std::move(out));
}

/// Original (C, a) parametrization: delta_1 = C,
/// delta_t ~ Exp(mean delta_{t-1} + C), output delta_t^a.
template <UniformSource G>
InterEventSeries sfp_legacy(double c, double a, std::size_t n, G& rng) {
  detail::require_positive(c, "C");
  detail::require_positive(a, "a");
  detail::require_count(n);
  std::vector<double> out;
  out.reserve(n);
  double state = c;
  const bool unit = a == 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) state = (state + c) * unit_exponential(rng);
    out.push_back(detail::positive_floor(unit ? state : std::pow(state, a)));
  }
  return InterEventSeries(std::move(out));
}

/// Lagged variant: each gap feeds back the gap eps steps earlier, with
/// eps = ceil(unit exponential) >= 1. References before the first gap fall
/// back to delta_1.
template <UniformSource G>
InterEventSeries sfp_star(double mu, std::size_t n, G& rng) {
  detail::require_positive(mu, "mu");
  detail::require_count(n);
  const double feed = mu / std::numbers::e;
  std::vector<double> out;
  out.reserve(n);
  out.push_back(mu);
  for (std::size_t k = 1; k < n; ++k) {
    const double lag_draw = std::ceil(unit_exponential(rng));
    const std::size_t lag = lag_draw < 1.0 ? 1 : static_cast<std::size_t>(lag_draw);
    const double ref = lag <= k ? out[k - lag] : out.front();
    out.push_back(detail::positive_floor((ref + feed) * unit_exponential(rng)));
  }
  return InterEventSeries(std::move(out));
}

/// Adds a constant setup time theta to every gap. The generating chain is
/// untouched; the overhead only shifts the output.
inline InterEventSeries with_dial_overhead(const InterEventSeries& series, double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw ParameterError("theta must be nonnegative");
  if (theta == 0.0) return series;
  std::vector<double> out(series.begin(), series.end());
  for (double& d : out) d += theta;
  return InterEventSeries(std::move(out));
}

struct MultiRecipient {
  double recipient_mean = 1.0;
  double delay_mean = 1.0;
};

/// Expands each event into r = ceil(Exp(recipient_mean)) copies (at least
/// one). The first copy keeps the original time; the others are delayed by
/// independent Exp(delay_mean) amounts. Times are measured from t0 = 0, so
/// the first output gap is the first event time.
template <UniformSource G>
InterEventSeries expand_multi_recipient(const InterEventSeries& series,
                                        const MultiRecipient& opts, G& rng) {
  detail::require_positive(opts.recipient_mean, "recipient_mean");
  detail::require_positive(opts.delay_mean, "delay_mean");
  std::vector<double> times;
  times.reserve(series.size() * 2);
  double t = 0.0;
  for (double d : series) {
    t += d;
    const double r_draw = std::ceil(opts.recipient_mean * unit_exponential(rng));
    const std::size_t copies = r_draw < 1.0 ? 1 : static_cast<std::size_t>(r_draw);
    times.push_back(t);
    for (std::size_t j = 1; j < copies; ++j)
      times.push_back(t + opts.delay_mean * unit_exponential(rng));
  }
  std::sort(times.begin(), times.end());
  std::vector<double> gaps;
  gaps.reserve(times.size());
  double prev = 0.0;
  for (double v : times) {
    double next = v > prev ? v : std::nextafter(prev, std::numeric_limits<double>::infinity());
    gaps.push_back(next - prev);
    prev = next;
  }
  return InterEventSeries(std::move(gaps));
}

/// Memoryless baseline: i.i.d. Exp(beta) gaps.
template <UniformSource G>
InterEventSeries poisson_process(double beta, std::size_t n, G& rng) {
  const ExponentialParams p(beta);
  detail::require_count(n);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(detail::positive_floor(exp_sample(p, rng)));
  return InterEventSeries(std::move(out));
}

/// Rounds every gap up to a whole second.
inline InterEventSeries round_up(const InterEventSeries& series) {
  std::vector<double> out(series.begin(), series.end());
  for (double& d : out) d = std::ceil(d);
  return InterEventSeries(std::move(out));
}

// -- configuration-driven dispatch ----------------------------------------

namespace variant {
struct Simple {};
struct General {};
struct Legacy {
  double c = 1.0;
  double a = 1.0;
};
struct Star {};
struct Poisson {
  double beta = 1.0;
};
}  // namespace variant

using GeneratorVariant = std::variant<variant::Simple, variant::General, variant::Legacy,
                                      variant::Star, variant::Poisson>;

struct SfpConfig {
  double mu = 1.0;
  double rho = 1.0;
  std::size_t n = 1;
  GeneratorVariant variant = variant::Simple{};
  double theta = 0.0;                  // dial overhead; 0 disables
  std::optional<MultiRecipient> multi; // multi-recipient expansion
  bool round_up = false;
};

template <UniformSource G>
InterEventSeries generate(const SfpConfig& cfg, G& rng) {
  if (!(cfg.theta >= 0.0)) throw ParameterError("theta must be nonnegative");
  InterEventSeries base = std::visit(
      [&](const auto& v) -> InterEventSeries {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, variant::Simple>) return sfp_simple(cfg.mu, cfg.n, rng);
        else if constexpr (std::is_same_v<V, variant::General>)
          return sfp_general(cfg.mu, cfg.rho, cfg.n, rng);
        else if constexpr (std::is_same_v<V, variant::Legacy>)
          return sfp_legacy(v.c, v.a, cfg.n, rng);
        else if constexpr (std::is_same_v<V, variant::Star>) return sfp_star(cfg.mu, cfg.n, rng);
        else return poisson_process(v.beta, cfg.n, rng);
      },
      cfg.variant);
  if (cfg.multi) base = expand_multi_recipient(base, *cfg.multi, rng);
  if (cfg.theta > 0.0) base = with_dial_overhead(base, cfg.theta);
  if (cfg.round_up) base = round_up(base);
  return base;
}

}  // namespace sfp

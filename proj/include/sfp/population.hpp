#pragma once

// Collective behavior: a bivariate Gaussian over (rho_i, ln mu_i), the
// built-in per-system presets, synthetic dataset generation and anomaly
// labeling by Mahalanobis distance.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sfp/distributions.hpp"
#include "sfp/errors.hpp"
#include "sfp/fitting.hpp"
#include "sfp/generators.hpp"
#include "sfp/random.hpp"
#include "sfp/series.hpp"

namespace sfp {

struct PopulationModel {
  BivariateGaussianParams params;
  std::string system_name;
  std::size_t min_events = kDefaultMinEvents;
};

/// Bumped whenever a value in the preset table changes.
inline constexpr int kPresetTableVersion = 1;

/// Fitted population parameters of eight communication systems; log mu is a
/// natural log of seconds.
inline const std::map<std::string, BivariateGaussianParams>& builtin_systems() {
  using P = BivariateGaussianParams;
  //                                         E(rho)  E(logmu) Var(rho) Var(logmu) Cov
  static const std::map<std::string, P> table{
      {"AskMe",   P::from_moments(0.927, 5.625, 0.016, 0.470, -0.028)},
      {"Digg",    P::from_moments(0.930, 5.126, 0.013, 0.291, -0.010)},
      {"Enron",   P::from_moments(0.830, 8.251, 0.006, 0.417, -0.018)},
      {"Meta",    P::from_moments(1.004, 5.455, 0.012, 0.317, 0.000263)},
      {"Mefi",    P::from_moments(1.033, 5.748, 0.014, 0.487, -0.021)},
      {"Phone",   P::from_moments(1.388, 5.714, 0.007, 0.041, -0.002)},
      {"SMS",     P::from_moments(0.920, 5.672, 0.006, 0.301, -0.025)},
      {"Youtube", P::from_moments(1.023, 5.274, 0.015, 1.163, -0.080)},
  };
  return table;
}

/// Case-insensitive preset lookup.
inline PopulationModel builtin_system(const std::string& name) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  const std::string key = lower(name);
  for (const auto& [n, p] : builtin_systems())
    if (lower(n) == key) return {p, n, kDefaultMinEvents};
  throw NotFoundError("unknown system '" + name + "'");
}

/// Sample mean and unbiased covariance of (rho_i, ln mu_i) over the fits
/// with at least min_events events.
inline PopulationModel fit_population(std::span<const FitResult> fits,
                                      std::size_t min_events = kDefaultMinEvents,
                                      std::string system_name = "fitted") {
  if (min_events < 2) throw ParameterError("min_events must be at least 2");
  std::vector<Vec2> pts;
  for (const auto& f : fits)
    if (f.n >= min_events && f.mu > 0.0) pts.push_back({f.rho, std::log(f.mu)});
  if (pts.size() < 3)
    throw InsufficientDataError("fit_population: need at least 3 qualifying fits");
  const double m = static_cast<double>(pts.size());
  Vec2 mean{0.0, 0.0};
  for (const auto& p : pts) {
    mean[0] += p[0];
    mean[1] += p[1];
  }
  mean[0] /= m;
  mean[1] /= m;
  Mat2 cov{};
  for (const auto& p : pts) {
    const double a = p[0] - mean[0], b = p[1] - mean[1];
    cov[0][0] += a * a;
    cov[0][1] += a * b;
    cov[1][1] += b * b;
  }
  for (auto* v : {&cov[0][0], &cov[0][1], &cov[1][1]}) *v /= (m - 1.0);
  cov[1][0] = cov[0][1];
  return {BivariateGaussianParams(mean, cov), std::move(system_name), min_events};
}

// -- synthetic datasets ----------------------------------------------------

struct SyntheticDatasetSpec {
  std::variant<std::string, PopulationModel> system;
  std::size_t n_individuals = 1;
  double window_T = 30.0 * 86400.0;
};

inline constexpr double kMinSampledRho = 0.05;
/// Hard stop for the per-individual event count of one window.
inline constexpr std::size_t kMaxEventsPerIndividual = 50'000'000;

/// Number of leading gaps whose cumulative sum stays strictly below T.
inline std::size_t window_prefix_length(std::span<const double> gaps, double window_T) {
  double sum = 0.0;
  std::size_t k = 0;
  for (double d : gaps) {
    if (!(sum + d < window_T)) break;
    sum += d;
    ++k;
  }
  return k;
}

/// Draws every individual's (rho_i, ln mu_i) from the population, clamps
/// rho_i at kMinSampledRho, and runs the generalized generator until the
/// next event would reach the window end. Individual i generates from the
/// stream rng.derive(i + 1); the parameter draws come from rng itself.
inline std::vector<EventSeries> generate_dataset(const SyntheticDatasetSpec& spec,
                                                 RandomSource& rng) {
  if (spec.n_individuals < 1) throw ParameterError("n_individuals must be >= 1");
  if (!(spec.window_T > 0.0) || !std::isfinite(spec.window_T))
    throw ParameterError("window_T must be positive");
  const PopulationModel model = std::visit(
      [](const auto& s) -> PopulationModel {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::string>)
          return builtin_system(s);
        else
          return s;
      },
      spec.system);

  std::vector<EventSeries> out;
  out.reserve(spec.n_individuals);
  for (std::size_t i = 0; i < spec.n_individuals; ++i) {
    const Vec2 draw = bvn_sample(model.params, rng);
    const double rho = std::max(draw[0], kMinSampledRho);
    const double mu = std::exp(draw[1]);
    RandomSource stream = rng.derive(i + 1);
    SfpChain chain(mu, rho);
    std::vector<double> ts;
    double t = 0.0;
    while (ts.size() < kMaxEventsPerIndividual) {
      const double gap = chain.next(stream);
      double next = t + gap;
      if (!(next < spec.window_T)) break;
      if (!(next > t)) next = std::nextafter(t, spec.window_T);
      ts.push_back(next);
      t = next;
    }
    out.emplace_back(model.system_name + "-" + std::to_string(i), std::move(ts));
  }
  return out;
}

// -- anomalies -------------------------------------------------------------

inline double mahalanobis_d2(const Vec2& y, const PopulationModel& model) {
  const auto& p = model.params;
  const double a = p.var_rho(), b = p.cov_rho_log_mu(), d = p.var_log_mu();
  const double det = a * d - b * b;
  if (!(det > 1e-14 * std::max(a * d, 1e-300)))
    throw ParameterError("mahalanobis_d2: covariance is singular");
  const double u = y[0] - p.mean_rho(), v = y[1] - p.mean_log_mu();
  const double q = (d * u * u - 2.0 * b * u * v + a * v * v) / det;
  return std::max(q, 0.0);
}

enum class AnomalyLabel { normal, A1, A2, A3 };

inline const char* to_string(AnomalyLabel l) {
  switch (l) {
    case AnomalyLabel::normal: return "normal";
    case AnomalyLabel::A1: return "A1";
    case AnomalyLabel::A2: return "A2";
    case AnomalyLabel::A3: return "A3";
  }
  return "normal";
}

struct AnomalyReport {
  std::string individual_id;
  double d2 = 0.0;
  bool fit_ok = true;
  AnomalyLabel label = AnomalyLabel::normal;
};

inline constexpr double kDefaultD2Threshold = 25.0;
inline constexpr double kDefaultR2Threshold = 0.90;

/// A1: good fit, far from the population. A2: poor fit, inside.
/// A3: poor fit and far.
inline AnomalyLabel anomaly_label(bool fit_ok, bool far) {
  if (fit_ok) return far ? AnomalyLabel::A1 : AnomalyLabel::normal;
  return far ? AnomalyLabel::A3 : AnomalyLabel::A2;
}

inline AnomalyReport classify_anomaly(const FitResult& fit, const PopulationModel& model,
                                      double d2_threshold = kDefaultD2Threshold,
                                      double r2_threshold = kDefaultR2Threshold) {
  if (!(fit.mu > 0.0) || !std::isfinite(fit.rho) || std::isnan(fit.r2))
    throw DataError("classify_anomaly: fit for '" + fit.individual_id + "' is invalid");
  AnomalyReport r;
  r.individual_id = fit.individual_id;
  r.d2 = mahalanobis_d2({fit.rho, std::log(fit.mu)}, model);
  r.fit_ok = fit.r2 >= r2_threshold;
  r.label = anomaly_label(r.fit_ok, r.d2 > d2_threshold);
  return r;
}

}  // namespace sfp

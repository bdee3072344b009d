#pragma once

#include <array>
#include <cmath>
#include <string>

#include "sfp/errors.hpp"
#include "sfp/random.hpp"

namespace sfp {

/// Log-logistic law parametrized by its median `mu` and odds-ratio slope
/// `rho`. The conventional shape parameter is sigma = 1/rho.
class LogLogisticParams {
 public:
  LogLogisticParams(double mu, double rho) : mu_(mu), rho_(rho) {
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw ParameterError("log-logistic median must be positive");
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw ParameterError("log-logistic slope must be positive");
  }

  double mu() const noexcept { return mu_; }
  double rho() const noexcept { return rho_; }
  double sigma() const noexcept { return 1.0 / rho_; }

 private:
  double mu_;
  double rho_;
};

/// Exponential law parametrized by its mean `beta` (rate 1/beta).
class ExponentialParams {
 public:
  explicit ExponentialParams(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw ParameterError("exponential mean must be positive");
  }

  double beta() const noexcept { return beta_; }
  double rate() const noexcept { return 1.0 / beta_; }

 private:
  double beta_;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

/// Lower-triangular factor of a 2x2 PSD matrix.
struct Cholesky2 {
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;
};

inline constexpr double kPsdTolerance = 1e-12;

/// Cholesky attempt with pivot tolerance. Pivots in (-tol, 0] are treated as
/// zero so that marginally indefinite sample covariances still factor.
inline Cholesky2 cholesky2(const Mat2& a, double tol = kPsdTolerance) {
  if (std::abs(a[0][1] - a[1][0]) > tol)
    throw ParameterError("covariance matrix is not symmetric");
  Cholesky2 c;
  const double p1 = a[0][0];
  if (p1 < -tol) throw ParameterError("covariance matrix is not PSD");
  if (p1 > tol) {
    c.l11 = std::sqrt(p1);
    c.l21 = a[1][0] / c.l11;
  } else if (std::abs(a[1][0]) > tol) {
    throw ParameterError("covariance matrix is not PSD");
  }
  const double p2 = a[1][1] - c.l21 * c.l21;
  if (p2 < -tol) throw ParameterError("covariance matrix is not PSD");
  c.l22 = p2 > 0.0 ? std::sqrt(p2) : 0.0;
  return c;
}

/// Bivariate Gaussian over (rho_i, log mu_i).
class BivariateGaussianParams {
 public:
  BivariateGaussianParams(Vec2 mean, Mat2 cov)
      : mean_(mean), cov_(cov), chol_(cholesky2(cov)) {}

  /// Table-style constructor: means, both variances and the covariance.
  static BivariateGaussianParams from_moments(double mean_rho,
                                              double mean_log_mu,
                                              double var_rho,
                                              double var_log_mu,
                                              double cov) {
    return BivariateGaussianParams({mean_rho, mean_log_mu},
                                   Mat2{Vec2{var_rho, cov}, Vec2{cov, var_log_mu}});
  }

  const Vec2& mean() const noexcept { return mean_; }
  const Mat2& cov() const noexcept { return cov_; }
  const Cholesky2& cholesky() const noexcept { return chol_; }

  double mean_rho() const noexcept { return mean_[0]; }
  double mean_log_mu() const noexcept { return mean_[1]; }
  double var_rho() const noexcept { return cov_[0][0]; }
  double var_log_mu() const noexcept { return cov_[1][1]; }
  double cov_rho_log_mu() const noexcept { return cov_[0][1]; }

 private:
  Vec2 mean_;
  Mat2 cov_;
  Cholesky2 chol_;
};

// -- log-logistic ----------------------------------------------------------

inline double llg_pdf(double x, const LogLogisticParams& p) {
  if (!(x > 0.0)) throw DomainError("llg_pdf: x must be positive");
  // z = (ln x - ln mu) / sigma; evaluated via e^{-|z|} to avoid overflow.
  const double z = (std::log(x) - std::log(p.mu())) * p.rho();
  const double w = std::exp(-std::abs(z));
  return p.rho() * w / (x * (1.0 + w) * (1.0 + w));
}

inline double llg_cdf(double x, const LogLogisticParams& p) {
  if (!(x > 0.0)) throw DomainError("llg_cdf: x must be positive");
  const double z = (std::log(x) - std::log(p.mu())) * p.rho();
  return 1.0 / (1.0 + std::exp(-z));
}

inline double llg_quantile(double q, const LogLogisticParams& p) {
  if (!(q > 0.0 && q < 1.0))
    throw DomainError("llg_quantile: q must lie in (0,1)");
  return p.mu() * std::pow(q / (1.0 - q), p.sigma());
}

// -- samplers --------------------------------------------------------------

template <UniformSource G>
double exp_sample(const ExponentialParams& p, G& rng) {
  return p.beta() * unit_exponential(rng);
}

/// One draw (rho_i, log mu_i): mean + L z with z two standard normals.
template <UniformSource G>
Vec2 bvn_sample(const BivariateGaussianParams& p, G& rng) {
  const auto [z1, z2] = standard_normal_pair(rng);
  const auto& c = p.cholesky();
  return {p.mean()[0] + c.l11 * z1, p.mean()[1] + c.l21 * z1 + c.l22 * z2};
}

}  // namespace sfp

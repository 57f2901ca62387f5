#pragma once

#include "kappaln/distribution.hpp"

namespace kappaln {

// Method used to evaluate an integer-order moment E[X^l].
enum class MomentMethod {
  kQuadrature,
  kLowerBound,
  kUpperBound,
  kPowerSeries,
};

struct MomentRequest {
  KappaParams params;
  int order = 1;                          // l >= 1
  MomentMethod method = MomentMethod::kQuadrature;
  int truncation = 2;                     // q* >= 1, power-series only
};

// Dispatches on req.method.  Throws std::invalid_argument on a bad request,
// std::domain_error when bounds are requested with kappa == 0, and
// std::overflow_error when the moment saturates double precision.
double moment(const MomentRequest& req);

// E[X^l] by adaptive quadrature of the latent-Gaussian integral over
// [mu - 12 sigma, mu + 12 sigma].
double moment_quadrature(const KappaParams& params, int order);

// Same moment computed through the scaling relation
// m_l(kappa; mu, sigma) = m_1(kappa/l; l mu, l sigma).
double moment_scaled(const KappaParams& params, int order);

// Hypergeometric lower/upper bounds on the order-l moment; require kappa > 0.
double moment_lower_bound(const KappaParams& params, int order);
double moment_upper_bound(const KappaParams& params, int order);

// Truncated power-series expansion around mu with q* = truncation terms.
double moment_power_series(const KappaParams& params, int order,
                           int truncation);

// g_n(mu; kappa, l) from the moment power-series recurrence (n >= 1).
// Exposed for testing against the closed forms for n <= 4.
double moment_series_g(int n, double mu, double kappa, int order);

}  // namespace kappaln

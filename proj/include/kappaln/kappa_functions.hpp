#pragma once

// Kaniadakis kappa-exponential and kappa-logarithm primitives.
//
// exp_kappa(y) = (sqrt(1 + k^2 y^2) + k y)^(1/k)   for k > 0
// ln_kappa(x)  = (x^k - x^(-k)) / (2k) = sinh(k ln x)/k
//
// Below the switch threshold kEpsilonKappa the exact k = 0 branch
// (natural exp/log) is used; the difference-of-powers form cancels
// catastrophically as k -> 0 while the switch error is O(k^2 ln^3 x).

#include <optional>
#include <vector>

namespace kappaln {

inline constexpr double kEpsilonKappa = 1e-8;

/// Deformed exponential; strictly positive and increasing in y.
/// Saturates to +inf past the representable range.
double exp_kappa(double y, double kappa);

/// Deformed logarithm, inverse of exp_kappa. Throws std::domain_error
/// for x <= 0.
double ln_kappa(double x, double kappa);

/// d/dy exp_kappa(y) = exp_kappa(y) / sqrt(1 + k^2 y^2).
double exp_kappa_dy(double y, double kappa);

/// d/dx ln_kappa(x) = (x^(k-1) + x^(-k-1)) / 2; always >= 1/x.
double ln_kappa_dx(double x, double kappa);

/// d/dkappa ln_kappa(x); vanishes as kappa -> 0 (ln_kappa is even in kappa).
double ln_kappa_dkappa(double x, double kappa);

/// Inflection point x+ = ((k+1)/(k-1))^(1/2k) of ln_kappa, which exists
/// only for kappa > 1; ln_kappa is concave everywhere otherwise.
std::optional<double> ln_kappa_inflection(double kappa);

/// Taylor coefficients xi_0..xi_{n_max} of exp_kappa around 0:
/// xi_0 = xi_1 = xi_2 = 1, xi_n = prod_{j=1}^{n-1} (1 - (2j - n) kappa).
std::vector<double> taylor_coefficients(double kappa, int n_max);

}  // namespace kappaln

#include "kappaln/kappa_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace kappaln {

double exp_kappa(double y, double kappa) {
  if (kappa <= kEpsilonKappa) return std::exp(y);
  const double ky = kappa * y;
  const double root = std::sqrt(1.0 + ky * ky);
  // For ky << 0 the sum root + ky cancels; use 1/(root - ky) instead.
  double log_base;
  if (ky >= 0.0) {
    log_base = std::log1p(ky * ky / (root + 1.0) + ky);  // log(root + ky)
  } else {
    log_base = -std::log1p(ky * ky / (root + 1.0) - ky);  // -log(root - ky)
  }
  return std::exp(log_base / kappa);
}

double ln_kappa(double x, double kappa) {
  if (!(x > 0.0)) throw std::domain_error("ln_kappa: x must be positive");
  const double lx = std::log(x);
  if (kappa <= kEpsilonKappa) return lx;
  return std::sinh(kappa * lx) / kappa;
}

double exp_kappa_dy(double y, double kappa) {
  if (kappa <= kEpsilonKappa) return std::exp(y);
  const double ky = kappa * y;
  return exp_kappa(y, kappa) / std::sqrt(1.0 + ky * ky);
}

double ln_kappa_dx(double x, double kappa) {
  if (!(x > 0.0)) throw std::domain_error("ln_kappa_dx: x must be positive");
  if (kappa <= kEpsilonKappa) return 1.0 / x;
  const double lx = std::log(x);
  return std::cosh(kappa * lx) / x;
}

double ln_kappa_dkappa(double x, double kappa) {
  if (!(x > 0.0)) throw std::domain_error("ln_kappa_dkappa: x must be positive");
  const double lx = std::log(x);
  // small-kappa expansion kappa lx^3 / 3 avoids cancellation; ln_kappa is
  // even in kappa, so the derivative vanishes at kappa = 0
  if (kappa <= kEpsilonKappa) return kappa * lx * lx * lx / 3.0;
  return (lx * std::cosh(kappa * lx) - std::sinh(kappa * lx) / kappa) / kappa;
}

std::optional<double> ln_kappa_inflection(double kappa) {
  if (kappa <= 1.0) return std::nullopt;
  return std::pow((kappa + 1.0) / (kappa - 1.0), 1.0 / (2.0 * kappa));
}

std::vector<double> taylor_coefficients(double kappa, int n_max) {
  std::vector<double> xi(static_cast<std::size_t>(n_max) + 1, 1.0);
  for (int n = 3; n <= n_max; ++n) {
    double prod = 1.0;
    for (int j = 1; j <= n - 1; ++j) {
      prod *= 1.0 - (2.0 * j - n) * kappa;
    }
    xi[static_cast<std::size_t>(n)] = prod;
  }
  return xi;
}

}  // namespace kappaln

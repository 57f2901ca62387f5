#include "kappaln/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "kappaln/kappa_functions.hpp"
#include "kappaln/quadrature.hpp"
#include "kappaln/special.hpp"

namespace kappaln {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

void validate_order(int order) {
  if (order < 1) throw std::invalid_argument("moment order must be >= 1");
}

// Polynomials in mu with ascending coefficients.
using Poly = std::vector<double>;

Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = i * p[i];
  return d;
}

void poly_axpy(Poly& acc, const Poly& p, double scale, int shift) {
  if (acc.size() < p.size() + shift) acc.resize(p.size() + shift, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i + shift] += scale * p[i];
}

// (1 + k^2 mu^2) * p
Poly poly_mul_s2(const Poly& p, double k2) {
  Poly out;
  poly_axpy(out, p, 1.0, 0);
  poly_axpy(out, p, k2, 2);
  return out;
}

double poly_eval(const Poly& p, double mu) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * mu + p[i];
  return v;
}

// g_n = P_n(mu) + Q_n(mu) * sqrt(1 + k^2 mu^2); the recurrence
//   g_{n+1} = (1 + k^2 mu^2) g_n' - [(2n-1) k^2 mu - l s] g_n
// is closed over this representation:
//   P_{n+1} = (1 + k^2 mu^2) P_n' - (2n-1) k^2 mu P_n + l (1 + k^2 mu^2) Q_n
//   Q_{n+1} = (1 + k^2 mu^2) Q_n' - (2n-2) k^2 mu Q_n + l P_n
void series_g_step(int n, double k2, double ell, Poly& p, Poly& q) {
  Poly p_next = poly_mul_s2(poly_derivative(p), k2);
  poly_axpy(p_next, p, -(2.0 * n - 1.0) * k2, 1);
  poly_axpy(p_next, poly_mul_s2(q, k2), ell, 0);

  Poly q_next = poly_mul_s2(poly_derivative(q), k2);
  poly_axpy(q_next, q, -(2.0 * n - 2.0) * k2, 1);
  poly_axpy(q_next, p, ell, 0);

  p = std::move(p_next);
  q = std::move(q_next);
}

}  // namespace

double moment_quadrature(const KappaParams& params, int order) {
  params.validate();
  validate_order(order);
  const double ell = order;
  const double k_eff = params.kappa / ell;
  const double lo = params.mu - 12.0 * params.sigma;
  const double hi = params.mu + 12.0 * params.sigma;
  const double peak = exp_kappa(ell * hi, k_eff);
  if (!std::isfinite(peak)) {
    throw std::overflow_error(
        "moment overflows double precision at the given order");
  }
  const double inv_sigma = 1.0 / params.sigma;
  const auto integrand = [&](double y) {
    const double z = (y - params.mu) * inv_sigma;
    return exp_kappa(ell * y, k_eff) * std::exp(-0.5 * z * z) * inv_sigma /
           kSqrt2Pi;
  };
  return integrate(integrand, lo, hi, 1e-9);
}

double moment_scaled(const KappaParams& params, int order) {
  params.validate();
  validate_order(order);
  const double ell = order;
  const KappaParams scaled{ell * params.mu, ell * params.sigma,
                           params.kappa / ell};
  return moment_quadrature(scaled, 1);
}

double moment_lower_bound(const KappaParams& params, int order) {
  params.validate();
  validate_order(order);
  if (params.kappa <= 0.0) {
    throw std::domain_error("moment bounds require kappa > 0");
  }
  const double ell = order;
  const double k = params.kappa;
  const double mu = params.mu;
  const double s = params.sigma;
  const double z = mu * mu / (2.0 * s * s);
  const double prefactor = std::pow(2.0 * k, ell / k) *
                           std::pow(2.0, (ell - k) / (2.0 * k)) *
                           std::pow(s, ell / k) / kSqrt2Pi * std::exp(-z);
  const double a1 = (ell + k) / (2.0 * k);
  const double a2 = (ell + 2.0 * k) / (2.0 * k);
  const double bracket =
      special::gamma(a1) * special::hyp1f1(a1, 0.5, z) +
      special::gamma(a2) * (mu * std::numbers::sqrt2 / s) * special::hyp1f1(a2, 1.5, z);
  const double tail =
      0.5 * std::exp(ell * mu + ell * ell * s * s / 2.0) *
      special::erfc((mu + ell * s * s) / (std::numbers::sqrt2 * s));
  return prefactor * bracket + tail;
}

double moment_upper_bound(const KappaParams& params, int order) {
  params.validate();
  validate_order(order);
  if (params.kappa <= 0.0) {
    throw std::domain_error("moment bounds require kappa > 0");
  }
  const double ell = order;
  const double k = params.kappa;
  const double mu = params.mu;
  const double s = params.sigma;
  const double z = mu * mu / (2.0 * s * s);
  const int n_star = static_cast<int>(std::ceil(ell / (2.0 * k)));
  const double prefactor = std::pow(2.0, ell / k - 1.0) * std::exp(-z) /
                           std::sqrt(std::numbers::pi);
  double sum = 0.0;
  double binom = 1.0;     // C(n*, m)
  double pow_term = 1.0;  // (2 k^2 s^2)^m
  for (int m = 0; m <= n_star; ++m) {
    const double bracket =
        special::gamma(m + 0.5) * special::hyp1f1(m + 0.5, 0.5, z) +
        special::gamma(m + 1.0) * (mu * std::numbers::sqrt2 / s) *
            special::hyp1f1(m + 1.0, 1.5, z);
    sum += binom * pow_term * bracket;
    binom *= static_cast<double>(n_star - m) / (m + 1.0);
    pow_term *= 2.0 * k * k * s * s;
  }
  return 0.5 * special::erfc(mu / (std::numbers::sqrt2 * s)) + prefactor * sum;
}

double moment_series_g(int n, double mu, double kappa, int order) {
  if (n < 1) throw std::invalid_argument("g_n requires n >= 1");
  validate_order(order);
  const double k2 = kappa * kappa;
  Poly p{1.0}, q{0.0};
  for (int i = 1; i < n; ++i) series_g_step(i, k2, order, p, q);
  return poly_eval(p, mu) +
         poly_eval(q, mu) * std::sqrt(1.0 + k2 * mu * mu);
}

double moment_power_series(const KappaParams& params, int order,
                           int truncation) {
  params.validate();
  validate_order(order);
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  const double ell = order;
  const double k = params.kappa;
  const double mu = params.mu;
  const double k2 = k * k;
  const double s2 = 1.0 + k2 * mu * mu;

  Poly p{1.0}, q{0.0};
  int n = 1;
  double series = 0.0;
  double factor = 1.0;  // sigma^{2q} / (q! 2^q)
  for (int qi = 1; qi <= truncation; ++qi) {
    while (n < 2 * qi) {
      series_g_step(n, k2, ell, p, q);
      ++n;
    }
    const double g2q = poly_eval(p, mu) + poly_eval(q, mu) * std::sqrt(s2);
    factor *= params.sigma * params.sigma / (2.0 * qi);
    series += factor * g2q / std::pow(s2, 2.0 * qi - 0.5);
  }
  return exp_kappa(ell * mu, k / ell) * (1.0 + ell * series);
}

double moment(const MomentRequest& req) {
  switch (req.method) {
    case MomentMethod::kQuadrature:
      return moment_quadrature(req.params, req.order);
    case MomentMethod::kLowerBound:
      return moment_lower_bound(req.params, req.order);
    case MomentMethod::kUpperBound:
      return moment_upper_bound(req.params, req.order);
    case MomentMethod::kPowerSeries:
      return moment_power_series(req.params, req.order, req.truncation);
  }
  throw std::invalid_argument("unknown moment method");
}

}  // namespace kappaln

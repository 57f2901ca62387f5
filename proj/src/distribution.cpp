#include "kappaln/distribution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kappaln/kappa_functions.hpp"
#include "kappaln/special.hpp"

namespace kappaln {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double standardized(double x, const KappaParams& p) {
  return (ln_kappa(x, p.kappa) - p.mu) / p.sigma;
}
}  // namespace

void KappaParams::validate() const {
  if (!(sigma > 0.0)) throw std::domain_error("KappaParams: sigma must be > 0");
  if (!(kappa >= 0.0)) throw std::domain_error("KappaParams: kappa must be >= 0");
}

double log_pdf(double x, const KappaParams& p) {
  if (!(x > 0.0)) throw std::domain_error("pdf: x must be positive");
  const double z = standardized(x, p);
  // ln of (x^(k-1) + x^(-k-1))/2 = cosh(k ln x)/x, stable for all kappa.
  const double lx = std::log(x);
  double log_jacobian;
  if (p.kappa <= kEpsilonKappa) {
    log_jacobian = -lx;
  } else {
    const double klx = p.kappa * lx;
    // log(cosh(t)) without overflow for large |t|
    const double a = std::fabs(klx);
    log_jacobian = a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0) - lx;
  }
  return -0.5 * z * z - std::log(kSqrt2Pi * p.sigma) + log_jacobian;
}

double pdf(double x, const KappaParams& p) { return std::exp(log_pdf(x, p)); }

double cdf(double x, const KappaParams& p) {
  if (!(x > 0.0)) throw std::domain_error("cdf: x must be positive");
  return 0.5 * special::erfc(-standardized(x, p) / kSqrt2);
}

double survival(double x, const KappaParams& p) {
  if (!(x > 0.0)) throw std::domain_error("survival: x must be positive");
  return 0.5 * special::erfc(standardized(x, p) / kSqrt2);
}

double quantile(double prob, const KappaParams& p) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("quantile: probability must lie in (0, 1)");
  }
  return exp_kappa(p.mu + p.sigma * kSqrt2 * special::erf_inv(2.0 * prob - 1.0),
                   p.kappa);
}

double hazard(double x, const KappaParams& p) {
  p.validate();
  if (x <= 0.0) throw std::domain_error("hazard requires x > 0");
  const double z = (ln_kappa(x, p.kappa) - p.mu) / p.sigma;
  if (z > 30.0) {
    // survival underflows long before the hazard does; use the Mills-ratio
    // asymptotic 1/h = sigma/(z g'(x)) (1 - 1/z^2 + 3/z^4 - 15/z^6)
    const double z2 = z * z;
    const double mills = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return ln_kappa_dx(x, p.kappa) * z / (p.sigma * mills);
  }
  const double s = survival(x, p);
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_pdf(x, p) - std::log(s));
}

namespace {

std::array<double, 3> sextic_coefficients(const KappaParams& p) {
  const double a = 2.0 * p.mu * p.kappa;
  const double b = 1.0 - 4.0 * p.kappa * p.sigma * p.sigma * (p.kappa - 1.0);
  const double c = 4.0 * p.kappa * p.sigma * p.sigma * (p.kappa + 1.0) - 1.0;
  return {a, b, c};
}

// Positive real roots of z^6 - a z^5 + b z^4 - 2a z^3 + c z^2 - a z - 1
// via companion-matrix eigenvalues, ascending.
std::vector<double> sextic_positive_roots(double a, double b, double c) {
  Eigen::Matrix<double, 6, 6> companion = Eigen::Matrix<double, 6, 6>::Zero();
  // Monic coefficients c0..c5 of z^6 + c5 z^5 + ... + c0.
  const double coef[6] = {-1.0, -a, c, -2.0 * a, b, -a};
  for (int i = 0; i < 6; ++i) companion(i, 5) = -coef[i];
  for (int i = 1; i < 6; ++i) companion(i, i - 1) = 1.0;

  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> solver(companion, false);
  std::vector<double> roots;
  for (int i = 0; i < 6; ++i) {
    const double re = solver.eigenvalues()(i).real();
    const double im = solver.eigenvalues()(i).imag();
    if (std::fabs(im) <= 1e-9 * (1.0 + std::fabs(re)) && re > 1e-12) {
      roots.push_back(re);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

int sextic_positive_root_count(const KappaParams& p) {
  if (p.kappa <= kEpsilonKappa) return 1;
  const auto [a, b, c] = sextic_coefficients(p);
  return static_cast<int>(sextic_positive_roots(a, b, c).size());
}

ModeReport mode_report(const KappaParams& p) {
  ModeReport report;
  if (p.kappa <= kEpsilonKappa) {
    const double m = std::exp(p.mu - p.sigma * p.sigma);
    report.stationary_points = {m};
    report.modes = {m};
    report.root_count = 1;
    report.coefficients = {0.0, 1.0, -1.0};
    return report;
  }

  report.coefficients = sextic_coefficients(p);
  const auto [a, b, c] = report.coefficients;
  const auto z_roots = sextic_positive_roots(a, b, c);
  for (double z : z_roots) {
    report.stationary_points.push_back(std::pow(z, 1.0 / p.kappa));
  }
  report.root_count = static_cast<int>(report.stationary_points.size());

  // Classify maxima by comparing log-pdf at each stationary point against
  // its neighboring midpoints; the density vanishes at both ends of
  // (0, inf), so maxima and minima alternate starting with a maximum.
  const auto& pts = report.stationary_points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double left = (i == 0) ? 0.5 * pts[i] : std::sqrt(pts[i - 1] * pts[i]);
    const double right =
        (i + 1 == pts.size()) ? 2.0 * pts[i] : std::sqrt(pts[i] * pts[i + 1]);
    const double at = log_pdf(pts[i], p);
    if (at >= log_pdf(left, p) && at >= log_pdf(right, p)) {
      report.modes.push_back(pts[i]);
    }
  }
  return report;
}

double normalized_typical_extreme(const KappaParams& p, int log2_n) {
  if (log2_n < 1) throw std::domain_error("normalized_typical_extreme: log2_n >= 1");
  const double n = std::pow(2.0, log2_n);
  return quantile(1.0 - 1.0 / n, p) / quantile(0.5, p);
}

}  // namespace kappaln

#pragma once

// Marginal kappa-lognormal distribution: density, CDF, quantile, hazard,
// survival, and mode enumeration via the characteristic sextic polynomial.

#include <array>
#include <vector>

namespace kappaln {

struct KappaParams {
  double mu = 0.0;     // latent Gaussian mean
  double sigma = 1.0;  // latent Gaussian std, > 0
  double kappa = 0.0;  // deformation, >= 0

  void validate() const;
};

struct ModeReport {
  std::vector<double> stationary_points;  // ascending, x = z_r^(1/kappa)
  std::vector<double> modes;              // local maxima among the above
  int root_count = 1;                     // positive real roots, in {1, 3, 5}
  std::array<double, 3> coefficients{};   // (a, b, c) of the sextic
};

double pdf(double x, const KappaParams& p);
double log_pdf(double x, const KappaParams& p);
double cdf(double x, const KappaParams& p);
double quantile(double prob, const KappaParams& p);
double survival(double x, const KappaParams& p);

/// pdf / survival; +inf when the survival underflows to zero.
double hazard(double x, const KappaParams& p);

/// Stationary points of the PDF from the sextic
/// p1(z) = z^6 - a z^5 + b z^4 - 2a z^3 + c z^2 - a z - 1
/// with a = 2 mu kappa, b = 1 - 4 kappa sigma^2 (kappa - 1),
/// c = 4 kappa sigma^2 (kappa + 1) - 1, mapped through x = z^(1/kappa).
/// The kappa = 0 branch reports the single lognormal mode exp(mu - sigma^2).
ModeReport mode_report(const KappaParams& p);

/// Count of positive real roots of the characteristic sextic only
/// (cheap path for parameter-grid censuses).
int sextic_positive_root_count(const KappaParams& p);

/// Q(1 - 2^-log2_n) / Q(0.5): typical extreme of N = 2^log2_n independent
/// draws normalized by the median.
double normalized_typical_extreme(const KappaParams& p, int log2_n);

}  // namespace kappaln

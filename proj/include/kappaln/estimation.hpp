#pragma once

// Parameter estimation for the marginal kappa-lognormal distribution:
// per-site negative log-likelihood with analytic gradient and Hessian,
// multistart maximum-likelihood fitting, quantile-based fitting, a
// profile-likelihood scan over kappa, and model selection against the
// lognormal.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "kappaln/distribution.hpp"

namespace kappaln {

struct MarginalFitResult {
  KappaParams params;
  double nll_per_site = 0.0;
  double aic = 0.0;  // 2k + 2 N nll_per_site
  double bic = 0.0;  // k ln N + 2 N nll_per_site
  double gradient_norm = 0.0;
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
  bool converged = false;
};

struct FitConfig {
  double kappa_init = 1.5;  // heuristic start for kappa
  double kappa_max = 10.0;
  int multistart_count = 8;
  double tolerance = 1e-8;
  std::optional<double> fix_kappa;  // profile mode: hold kappa fixed
};

struct ProfilePoint {
  double kappa = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double nll = 0.0;
};

struct ModelComparison {
  MarginalFitResult kappa_lognormal;  // k = 3
  MarginalFitResult lognormal;        // k = 2, kappa fixed at 0
};

/// Per-site NLL: ln(2 sqrt(2 pi) sigma) + (1/2N sigma^2) sum (ln_k x_i - mu)^2
///             - (1/N) sum ln(x_i^(k-1) + x_i^(-k-1)).
double nll(const std::vector<double>& samples, const KappaParams& p);

/// Analytic gradient (d/dmu, d/dsigma, d/dkappa) of nll.
Eigen::Vector3d nll_gradient(const std::vector<double>& samples,
                             const KappaParams& p);

/// Analytic Hessian of nll; exactly symmetric by construction.
Eigen::Matrix3d nll_hessian(const std::vector<double>& samples,
                            const KappaParams& p);

/// Multistart box-constrained quasi-Newton MLE.
MarginalFitResult fit_marginal(const std::vector<double>& samples,
                               const FitConfig& cfg = {});

/// Quantile fitting: golden-section scan of the univariate quantile-distance
/// cost over kappa in [0, kappa_max].
MarginalFitResult fit_quantile(const std::vector<double>& samples,
                               double kappa_max = 10.0);

/// Profile NLL over a kappa grid; (mu, sigma) fitted in closed form per
/// kappa by a Gaussian fit of ln_kappa(x).
std::vector<ProfilePoint> profile_nll(const std::vector<double>& samples,
                                      const std::vector<double>& kappa_grid);

/// Fits both the kappa-lognormal (free kappa) and the lognormal (kappa = 0)
/// and reports NLL/AIC/BIC for each.
ModelComparison model_select(const std::vector<double>& samples);

/// Sample quantile with plotting position (i - 0.5)/N, linear interpolation.
/// sorted must be ascending.
double sample_quantile(const std::vector<double>& sorted, double prob);

}  // namespace kappaln

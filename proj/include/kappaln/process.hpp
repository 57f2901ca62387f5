#pragma once

// Kappa-lognormal stochastic processes on a latent Gaussian field:
// covariance kernels, covariance assembly, exact simulation through the
// principal matrix square root, the joint negative log-likelihood, and the
// three-stage estimation pipeline (marginal fit, latent transform, kernel
// fit with the marginal kappa held fixed).

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "kappaln/distribution.hpp"
#include "kappaln/estimation.hpp"

namespace kappaln {

using Coord = std::array<double, 2>;  // 1-D series use {t, 0}

// Linear damped harmonic oscillator:
// C(tau) = sigma2 e^{-|tau|/(2 tau_c)} [cos(w_d tau) + sin(w_d |tau|)/(2 w_d tau_c)]
struct LdhoKernel {
  double sigma2 = 1.0;
  double tau_c = 1.0;
  double omega_d = 1.0;
};

// Anisotropic exponential: C(r) = sigma2 exp(-h/xi) with
// h = sqrt(r^T M^{-1} r), M^{-1} built from aspect ratio rho and angle phi.
struct ExpAnisoKernel {
  double sigma2 = 1.0;
  double xi = 1.0;
  double rho = 1.0;  // anisotropy ratio >= 1
  double phi = 0.0;  // rotation angle, radians
};

// Anisotropic Matern with smoothness nu; nu = 0.5 reduces to ExpAniso.
struct MaternAnisoKernel {
  double sigma2 = 1.0;
  double xi = 1.0;
  double nu = 0.5;
  double rho = 1.0;
  double phi = 0.0;
};

using KernelSpec = std::variant<LdhoKernel, ExpAnisoKernel, MaternAnisoKernel>;

struct LatentGaussianModel {
  KappaParams marginal;
  KernelSpec kernel;
  double noise_var = 0.0;  // sigma^2_epsilon on the latent diagonal
};

struct SampleSet {
  std::vector<Coord> coords;
  std::vector<double> values;  // positive observables x
};

/// Stationary covariance at the given lag; symmetric in the lag sign.
double kernel_eval(const KernelSpec& kernel, const Coord& lag);

/// Variance at zero lag.
double kernel_sigma2(const KernelSpec& kernel);

/// Copy of the kernel with the variance replaced.
KernelSpec kernel_with_sigma2(const KernelSpec& kernel, double sigma2);

/// [C]_ij = kernel(s_i - s_j) + noise_var 1{i=j}.
Eigen::MatrixXd cov_matrix(const KernelSpec& kernel,
                           const std::vector<Coord>& coords, double noise_var);

/// n_realizations x N observable draws: x = exp_kappa(mu + A z) with A the
/// principal square root of the kernel covariance (negative eigenvalues
/// clipped at zero).  Deterministic under the seed.
Eigen::MatrixXd simulate(const LatentGaussianModel& model,
                         const std::vector<Coord>& coords, std::uint64_t seed,
                         int n_realizations);

/// Exact joint NLL (not normalized by N): Gaussian NLL of y = ln_kappa(x)
/// under the kernel covariance plus the Jacobian term.  Cholesky with
/// escalating jitter 1e-10..1e-6 of the kernel variance.
double joint_nll(const LatentGaussianModel& model, const SampleSet& data);

/// Gaussian NLL (log-det + quadratic-form halves plus N/2 ln 2pi) for a
/// stationary autocovariance sequence acf[0..N-1] on a uniform 1-D grid,
/// computed by the O(N^2) Durbin-Levinson innovations recursion.  Fast path
/// used by fit_process; must agree with the dense Cholesky route.
double gaussian_nll_toeplitz(const std::vector<double>& acf,
                             const Eigen::VectorXd& residuals);

enum class KernelFamily { kLdho, kExpAniso, kMaternAniso };

struct ProcessFitConfig {
  FitConfig marginal;           // Step-1 marginal MLE configuration
  bool estimate_noise = false;  // free sigma^2_epsilon in Step 3
  bool anisotropic = true;      // spatial kernels: free (rho, phi)
  std::optional<double> fix_nu; // Matern smoothness, free when unset
  int multistart = 3;           // kernel-parameter starts
};

struct ProcessFitResult {
  LatentGaussianModel model;
  MarginalFitResult marginal_fit;
  double joint_nll_value = 0.0;
  bool converged = false;
};

/// Three-stage fit: marginal MLE for (mu, sigma, kappa); transform to the
/// latent field; Nelder-Mead over kernel parameters with (mu, sigma^2)
/// profiled out in closed form per candidate kernel.
ProcessFitResult fit_process(const SampleSet& data, KernelFamily family,
                             const ProcessFitConfig& cfg = {});

}  // namespace kappaln

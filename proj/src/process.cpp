#include "kappaln/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kappaln/optimize.hpp"

#include "kappaln/kappa_functions.hpp"
#include "kappaln/rng.hpp"
#include "kappaln/special.hpp"

namespace kappaln {

namespace {

double log_cosh(double t) {
  const double a = std::fabs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// Negative log of the Jacobian product of the kappa-transform:
// -sum ln[(x^(k-1) + x^(-k-1))/2] = -sum [ln cosh(k ln x) - ln x].
double neg_log_jacobian(const std::vector<double>& values, double kappa) {
  double acc = 0.0;
  for (double x : values) {
    const double lx = std::log(x);
    acc -= log_cosh(kappa * lx) - lx;
  }
  return acc;
}

double anisotropic_distance(double dx, double dy, double rho, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double inv_r2 = 1.0 / (rho * rho);
  const double m11 = c * c + s * s * inv_r2;
  const double m22 = s * s + c * c * inv_r2;
  const double m12 = c * s * (1.0 - inv_r2);
  const double h2 = m11 * dx * dx + 2.0 * m12 * dx * dy + m22 * dy * dy;
  return std::sqrt(std::max(h2, 0.0));
}

double matern_correlation(double h, double xi, double nu) {
  if (h <= 0.0) return 1.0;
  const double z = std::sqrt(2.0 * nu) * h / xi;
  if (z > 700.0) return 0.0;
  return std::pow(2.0, 1.0 - nu) / special::gamma(nu) * std::pow(z, nu) *
         std::cyl_bessel_k(nu, z);
}

struct GlsQuadratics {
  double logdet = 0.0;  // ln det of the correlation matrix
  double q_yy = 0.0;    // y^T A^{-1} y
  double q_y1 = 0.0;    // y^T A^{-1} 1
  double q_11 = 0.0;    // 1^T A^{-1} 1
};

// Durbin-Levinson innovations sweep for a Toeplitz correlation sequence,
// applied simultaneously to y and the all-ones vector.
GlsQuadratics toeplitz_gls(const std::vector<double>& acf,
                           const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  GlsQuadratics q;
  double v = acf[0];
  if (!(v > 0.0)) throw std::runtime_error("toeplitz: non-positive variance");
  std::vector<double> phi, phi_prev;
  double e_y = y[0], e_1 = 1.0;
  q.logdet += std::log(v);
  q.q_yy += e_y * e_y / v;
  q.q_y1 += e_y * e_1 / v;
  q.q_11 += e_1 * e_1 / v;
  for (int k = 1; k < n; ++k) {
    double num = acf[k];
    for (int j = 1; j < k; ++j) num -= phi[j - 1] * acf[k - j];
    const double refl = num / v;
    phi_prev = phi;
    phi.resize(k);
    for (int j = 1; j < k; ++j) {
      phi[j - 1] = phi_prev[j - 1] - refl * phi_prev[k - 1 - j];
    }
    phi[k - 1] = refl;
    v *= (1.0 - refl * refl);
    if (!(v > 1e-300)) {
      throw std::runtime_error("toeplitz: covariance not positive definite");
    }
    double pred_y = 0.0, pred_1 = 0.0;
    for (int j = 1; j <= k; ++j) {
      pred_y += phi[j - 1] * y[k - j];
      pred_1 += phi[j - 1];
    }
    e_y = y[k] - pred_y;
    e_1 = 1.0 - pred_1;
    q.logdet += std::log(v);
    q.q_yy += e_y * e_y / v;
    q.q_y1 += e_y * e_1 / v;
    q.q_11 += e_1 * e_1 / v;
  }
  return q;
}

Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(Eigen::MatrixXd cov,
                                               double scale) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double jitter = 1e-10 * scale;
  while (llt.info() != Eigen::Success && jitter <= 1e-6 * scale) {
    cov.diagonal().array() += jitter;
    llt.compute(cov);
    jitter *= 10.0;
  }
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("covariance factorization failed");
  }
  return llt;
}

GlsQuadratics dense_gls(const Eigen::MatrixXd& corr, const Eigen::VectorXd& y) {
  const auto llt = factor_with_jitter(corr, 1.0);
  GlsQuadratics q;
  const Eigen::MatrixXd& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    q.logdet += 2.0 * std::log(l(i, i));
  }
  const Eigen::VectorXd wy = llt.matrixL().solve(y);
  const Eigen::VectorXd w1 =
      llt.matrixL().solve(Eigen::VectorXd::Ones(y.size()));
  q.q_yy = wy.squaredNorm();
  q.q_y1 = wy.dot(w1);
  q.q_11 = w1.squaredNorm();
  return q;
}

// Returns the grid spacing when the coords form a uniform 1-D grid in the
// given order, otherwise nullopt.
std::optional<double> uniform_grid_step(const std::vector<Coord>& coords) {
  if (coords.size() < 3) return std::nullopt;
  const double dt = coords[1][0] - coords[0][0];
  if (!(dt > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i][1] != 0.0) return std::nullopt;
    if (i > 0 && std::fabs(coords[i][0] - coords[i - 1][0] - dt) >
                     1e-9 * std::fabs(dt)) {
      return std::nullopt;
    }
  }
  return dt;
}

}  // namespace

double kernel_eval(const KernelSpec& kernel, const Coord& lag) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LdhoKernel>) {
          const double tau = std::hypot(lag[0], lag[1]);
          const double osc = k.omega_d * tau;
          const double sin_term =
              osc < 1e-8 ? tau / (2.0 * k.tau_c)
                         : std::sin(osc) / (2.0 * k.omega_d * k.tau_c);
          return k.sigma2 * std::exp(-tau / (2.0 * k.tau_c)) *
                 (std::cos(osc) + sin_term);
        } else if constexpr (std::is_same_v<T, ExpAnisoKernel>) {
          const double h =
              anisotropic_distance(lag[0], lag[1], k.rho, k.phi);
          return k.sigma2 * std::exp(-h / k.xi);
        } else {
          const double h =
              anisotropic_distance(lag[0], lag[1], k.rho, k.phi);
          return k.sigma2 * matern_correlation(h, k.xi, k.nu);
        }
      },
      kernel);
}

double kernel_sigma2(const KernelSpec& kernel) {
  return std::visit([](const auto& k) { return k.sigma2; }, kernel);
}

KernelSpec kernel_with_sigma2(const KernelSpec& kernel, double sigma2) {
  KernelSpec out = kernel;
  std::visit([&](auto& k) { k.sigma2 = sigma2; }, out);
  return out;
}

Eigen::MatrixXd cov_matrix(const KernelSpec& kernel,
                           const std::vector<Coord>& coords,
                           double noise_var) {
  const Eigen::Index n = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Coord lag{coords[i][0] - coords[j][0],
                      coords[i][1] - coords[j][1]};
      const double value = kernel_eval(kernel, lag);
      cov(i, j) = value;
      cov(j, i) = value;
    }
    cov(i, i) += noise_var;
  }
  return cov;
}

Eigen::MatrixXd simulate(const LatentGaussianModel& model,
                         const std::vector<Coord>& coords, std::uint64_t seed,
                         int n_realizations) {
  if (n_realizations < 1) throw std::invalid_argument("n_realizations >= 1");
  const Eigen::Index n = static_cast<Eigen::Index>(coords.size());
  const Eigen::MatrixXd cov =
      cov_matrix(model.kernel, coords, model.noise_var);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const Eigen::VectorXd clipped =
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root =
      eig.eigenvectors() * clipped.asDiagonal() *
      eig.eigenvectors().transpose();  // principal square root

  Rng rng(seed);
  Eigen::MatrixXd out(n_realizations, n);
  Eigen::VectorXd z(n);
  for (int r = 0; r < n_realizations; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    const Eigen::VectorXd latent = root * z;
    for (Eigen::Index i = 0; i < n; ++i) {
      out(r, i) = exp_kappa(model.marginal.mu + latent[i],
                            model.marginal.kappa);
    }
  }
  return out;
}

double joint_nll(const LatentGaussianModel& model, const SampleSet& data) {
  const std::size_t n = data.values.size();
  if (n == 0 || n != data.coords.size()) {
    throw std::invalid_argument("empty or inconsistent sample set");
  }
  for (double x : data.values) {
    if (!(x > 0.0)) throw std::domain_error("values must be positive");
  }
  const double kappa = model.marginal.kappa;
  Eigen::VectorXd resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    resid[static_cast<Eigen::Index>(i)] =
        ln_kappa(data.values[i], kappa) - model.marginal.mu;
  }
  const Eigen::MatrixXd cov =
      cov_matrix(model.kernel, data.coords, model.noise_var);
  const auto llt = factor_with_jitter(cov, kernel_sigma2(model.kernel));
  double logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
  }
  const double quad = llt.matrixL().solve(resid).squaredNorm();
  return 0.5 * logdet + 0.5 * quad +
         0.5 * n * std::log(2.0 * std::numbers::pi) +
         neg_log_jacobian(data.values, kappa);
}

double gaussian_nll_toeplitz(const std::vector<double>& acf,
                             const Eigen::VectorXd& residuals) {
  if (acf.size() < static_cast<std::size_t>(residuals.size())) {
    throw std::invalid_argument("autocovariance shorter than data");
  }
  const GlsQuadratics q = toeplitz_gls(acf, residuals);
  // toeplitz_gls accumulates logdet and quadratics of the full covariance
  return 0.5 * q.logdet + 0.5 * q.q_yy +
         0.5 * residuals.size() * std::log(2.0 * std::numbers::pi);
}

namespace {

struct KernelParameterization {
  KernelFamily family;
  bool anisotropic;
  bool estimate_noise;
  std::optional<double> fix_nu;

  int size() const {
    int n = family == KernelFamily::kLdho ? 2 : 1;
    if (family != KernelFamily::kLdho && anisotropic) n += 2;
    if (family == KernelFamily::kMaternAniso && !fix_nu) n += 1;
    if (estimate_noise) n += 1;
    return n;
  }

  // theta holds logs of positive parameters; phi is untransformed.
  KernelSpec kernel(const Eigen::VectorXd& theta) const {
    int i = 0;
    switch (family) {
      case KernelFamily::kLdho: {
        LdhoKernel k;
        k.sigma2 = 1.0;
        k.tau_c = std::exp(theta[i++]);
        k.omega_d = std::exp(theta[i++]);
        return k;
      }
      case KernelFamily::kExpAniso: {
        ExpAnisoKernel k;
        k.sigma2 = 1.0;
        k.xi = std::exp(theta[i++]);
        if (anisotropic) {
          k.rho = 1.0 + std::exp(theta[i++]);
          k.phi = theta[i++];
        }
        return k;
      }
      case KernelFamily::kMaternAniso: {
        MaternAnisoKernel k;
        k.sigma2 = 1.0;
        k.xi = std::exp(theta[i++]);
        if (anisotropic) {
          k.rho = 1.0 + std::exp(theta[i++]);
          k.phi = theta[i++];
        }
        k.nu = fix_nu ? *fix_nu
                      : std::clamp(std::exp(theta[i++]), 0.25, 3.5);
        return k;
      }
    }
    throw std::logic_error("unknown kernel family");
  }

  double noise_ratio(const Eigen::VectorXd& theta) const {
    return estimate_noise ? std::exp(theta[theta.size() - 1]) : 0.0;
  }
};

}  // namespace

ProcessFitResult fit_process(const SampleSet& data, KernelFamily family,
                             const ProcessFitConfig& cfg) {
  if (data.values.size() < 20 || data.values.size() != data.coords.size()) {
    throw std::invalid_argument("need at least 20 consistent samples");
  }
  ProcessFitResult result;
  result.marginal_fit = fit_marginal(data.values, cfg.marginal);
  const double kappa = result.marginal_fit.params.kappa;

  const Eigen::Index n = static_cast<Eigen::Index>(data.values.size());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = ln_kappa(data.values[i], kappa);
  }

  const std::optional<double> grid_step = uniform_grid_step(data.coords);
  const KernelParameterization par{family, cfg.anisotropic,
                                   cfg.estimate_noise, cfg.fix_nu};

  // Profile (mu, sigma^2) in closed form for a candidate correlation
  // kernel: mu-hat = (1' A^{-1} y)/(1' A^{-1} 1),
  // sigma^2-hat = (y - mu 1)' A^{-1} (y - mu 1)/N.
  struct Profiled {
    double nll;  // Gaussian NLL at the profiled optimum, Jacobian excluded
    double mu;
    double sigma2;
  };
  const auto profiled = [&](const Eigen::VectorXd& theta) -> Profiled {
    const KernelSpec corr = par.kernel(theta);
    const double g = par.noise_ratio(theta);
    GlsQuadratics q;
    if (grid_step) {
      std::vector<double> acf(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        acf[i] = kernel_eval(corr, {*grid_step * i, 0.0});
      }
      acf[0] += g;
      q = toeplitz_gls(acf, y);
    } else {
      Eigen::MatrixXd corr_m = cov_matrix(corr, data.coords, g);
      q = dense_gls(corr_m, y);
    }
    const double mu = q.q_y1 / q.q_11;
    const double sigma2 =
        std::max((q.q_yy - q.q_y1 * q.q_y1 / q.q_11) / n, 1e-300);
    const double nll =
        0.5 * q.logdet +
        0.5 * n * (1.0 + std::log(sigma2) +
                   std::log(2.0 * std::numbers::pi));
    return {nll, mu, sigma2};
  };
  const auto objective = [&](const Eigen::VectorXd& theta) -> double {
    try {
      return profiled(theta).nll;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // span of the sampling domain drives the initial length scales
  double lo0 = data.coords[0][0], hi0 = lo0, lo1 = data.coords[0][1],
         hi1 = lo1;
  for (const auto& c : data.coords) {
    lo0 = std::min(lo0, c[0]);
    hi0 = std::max(hi0, c[0]);
    lo1 = std::min(lo1, c[1]);
    hi1 = std::max(hi1, c[1]);
  }
  const double span = std::max(hi0 - lo0, hi1 - lo1);

  std::vector<Eigen::VectorXd> starts;
  const int dim = par.size();
  for (int ms = 0; ms < std::max(1, cfg.multistart); ++ms) {
    Eigen::VectorXd theta(dim);
    int i = 0;
    const double scale = span / (2.0 * (1 << ms));  // T/2, T/4, T/8, ...
    if (family == KernelFamily::kLdho) {
      theta[i++] = std::log(scale);
      // omega_d start: 2 pi / (T/10) then multiples
      theta[i++] = std::log(2.0 * std::numbers::pi * 10.0 * (1 << ms) / span);
    } else {
      theta[i++] = std::log(std::max(scale / 5.0, 1e-3));
      if (cfg.anisotropic) {
        theta[i++] = std::log(0.5 + ms);  // rho = 1.5, 2.5, ...
        theta[i++] = 0.3 * ms;            // phi
      }
      if (family == KernelFamily::kMaternAniso && !cfg.fix_nu) {
        theta[i++] = std::log(0.5 * (ms + 1));
      }
    }
    if (cfg.estimate_noise) theta[dim - 1] = std::log(0.01);
    starts.push_back(theta);
  }

  double best_f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta;
  bool converged = false;
  for (const auto& s : starts) {
    const Eigen::VectorXd step = Eigen::VectorXd::Constant(dim, 0.3);
    const OptResult r = nelder_mead(objective, s, step, 1e-9, 1500);
    if (r.f < best_f) {
      best_f = r.f;
      best_theta = r.x;
      converged = r.converged;
    }
  }
  if (!best_theta.size()) {
    throw std::runtime_error("kernel fit failed from every start");
  }

  const Profiled opt = profiled(best_theta);
  result.model.marginal = {opt.mu, std::sqrt(opt.sigma2), kappa};
  result.model.kernel =
      kernel_with_sigma2(par.kernel(best_theta), opt.sigma2);
  result.model.noise_var = par.noise_ratio(best_theta) * opt.sigma2;
  result.joint_nll_value =
      opt.nll + neg_log_jacobian(data.values, kappa);
  result.converged = converged && result.marginal_fit.converged;
  return result;
}

}  // namespace kappaln

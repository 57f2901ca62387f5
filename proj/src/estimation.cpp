#include "kappaln/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "kappaln/kappa_functions.hpp"
#include "kappaln/optimize.hpp"
#include "kappaln/special.hpp"

namespace kappaln {

namespace {

constexpr double kLog2Sqrt2Pi = 1.6120857137646178;  // ln(2 sqrt(2 pi))

void validate_samples(const std::vector<double>& samples,
                      std::size_t min_size) {
  if (samples.size() < min_size) {
    throw std::invalid_argument("not enough samples");
  }
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::domain_error("samples must be positive and finite");
    }
  }
}

// ln(cosh(t)) without overflow for large |t|.
double log_cosh(double t) {
  const double a = std::fabs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

struct SampleCache {
  std::vector<double> log_x;

  explicit SampleCache(const std::vector<double>& samples) {
    log_x.reserve(samples.size());
    for (double x : samples) log_x.push_back(std::log(x));
  }
};

// Per-sample quantities for a given kappa.
struct KappaTerms {
  double lnk;    // ln_kappa(x)
  double dlnk;   // d ln_kappa / d kappa
  double d2lnk;  // d^2 ln_kappa / d kappa^2
  double tanh_t; // tanh(kappa ln x)
  double sech2;  // sech^2(kappa ln x)
};

KappaTerms kappa_terms(double lx, double kappa) {
  KappaTerms t;
  if (kappa <= kEpsilonKappa) {
    t.lnk = lx;
    t.dlnk = kappa * lx * lx * lx / 3.0;
    t.d2lnk = lx * lx * lx / 3.0;
    t.tanh_t = std::tanh(kappa * lx);
    t.sech2 = 1.0;
    return t;
  }
  const double u = kappa * lx;
  const double ch = std::cosh(u);
  t.lnk = std::sinh(u) / kappa;
  t.dlnk = (lx * ch - t.lnk) / kappa;
  t.d2lnk = lx * lx * t.lnk - 2.0 * lx * ch / (kappa * kappa) +
            2.0 * t.lnk / (kappa * kappa);
  t.tanh_t = std::tanh(u);
  const double sech = 1.0 / ch;
  t.sech2 = sech * sech;
  return t;
}

double nll_cached(const SampleCache& cache, const KappaParams& p) {
  const double n = static_cast<double>(cache.log_x.size());
  double quad = 0.0, jac = 0.0;
  for (double lx : cache.log_x) {
    const double lnk =
        p.kappa <= kEpsilonKappa ? lx : std::sinh(p.kappa * lx) / p.kappa;
    const double d = lnk - p.mu;
    quad += d * d;
    jac += std::numbers::ln2 + log_cosh(p.kappa * lx) - lx;
  }
  return kLog2Sqrt2Pi + std::log(p.sigma) +
         quad / (2.0 * n * p.sigma * p.sigma) - jac / n;
}

Eigen::Vector3d nll_gradient_cached(const SampleCache& cache,
                                    const KappaParams& p) {
  const double n = static_cast<double>(cache.log_x.size());
  const double s2 = p.sigma * p.sigma;
  double sum_d = 0.0, sum_d2 = 0.0, sum_quad_k = 0.0, sum_jac_k = 0.0;
  for (double lx : cache.log_x) {
    const auto t = kappa_terms(lx, p.kappa);
    const double d = t.lnk - p.mu;
    sum_d += d;
    sum_d2 += d * d;
    sum_quad_k += d * t.dlnk;
    sum_jac_k += lx * t.tanh_t;
  }
  Eigen::Vector3d g;
  g[0] = -sum_d / (n * s2);
  g[1] = 1.0 / p.sigma - sum_d2 / (n * s2 * p.sigma);
  g[2] = sum_quad_k / (n * s2) - sum_jac_k / n;
  return g;
}

Eigen::Matrix3d nll_hessian_cached(const SampleCache& cache,
                                   const KappaParams& p) {
  const double n = static_cast<double>(cache.log_x.size());
  const double s2 = p.sigma * p.sigma;
  double sum_d = 0.0, sum_d2 = 0.0, sum_dlnk = 0.0, sum_d_dlnk = 0.0;
  double sum_kk = 0.0, sum_jac_kk = 0.0;
  for (double lx : cache.log_x) {
    const auto t = kappa_terms(lx, p.kappa);
    const double d = t.lnk - p.mu;
    sum_d += d;
    sum_d2 += d * d;
    sum_dlnk += t.dlnk;
    sum_d_dlnk += d * t.dlnk;
    sum_kk += t.dlnk * t.dlnk + d * t.d2lnk;
    sum_jac_kk += lx * lx * t.sech2;
  }
  Eigen::Matrix3d h;
  h(0, 0) = 1.0 / s2;
  h(0, 1) = 2.0 * sum_d / (n * s2 * p.sigma);
  h(0, 2) = -sum_dlnk / (n * s2);
  h(1, 1) = 3.0 * sum_d2 / (n * s2 * s2) - 1.0 / s2;
  h(1, 2) = -2.0 * sum_d_dlnk / (n * s2 * p.sigma);
  h(2, 2) = sum_kk / (n * s2) - sum_jac_kk / n;
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

// sigma from the M = 99 percentile-level average; the median level m = 50
// is skipped (its normal quantile is zero, making the ratio 0/0).
double sigma_quantile_average(const std::vector<double>& sorted, double mu,
                              double kappa) {
  double sum = 0.0;
  int count = 0;
  for (int m = 1; m <= 99; ++m) {
    if (m == 50) continue;
    const double pm = 0.01 * m;
    const double z = std::numbers::sqrt2 * special::erf_inv(2.0 * pm - 1.0);
    sum += (ln_kappa(sample_quantile(sorted, pm), kappa) - mu) / z;
    ++count;
  }
  return sum / count;
}

struct CommonStats {
  std::vector<double> sorted;
  double log_mean = 0.0;
  double log_std = 0.0;
  double median = 0.0;
};

CommonStats common_stats(const std::vector<double>& samples) {
  CommonStats st;
  st.sorted = samples;
  std::sort(st.sorted.begin(), st.sorted.end());
  double sum = 0.0;
  for (double x : samples) sum += std::log(x);
  st.log_mean = sum / samples.size();
  double var = 0.0;
  for (double x : samples) {
    const double d = std::log(x) - st.log_mean;
    var += d * d;
  }
  st.log_std = std::sqrt(var / samples.size());
  st.median = sample_quantile(st.sorted, 0.5);
  return st;
}

MarginalFitResult finalize_fit(const SampleCache& cache,
                               const KappaParams& params, int k_params,
                               bool converged) {
  MarginalFitResult r;
  r.params = params;
  r.nll_per_site = nll_cached(cache, params);
  r.gradient_norm = nll_gradient_cached(cache, params).norm();
  r.hessian = nll_hessian_cached(cache, params);
  r.converged = converged;
  const double n = static_cast<double>(cache.log_x.size());
  r.aic = 2.0 * k_params + 2.0 * n * r.nll_per_site;
  r.bic = k_params * std::log(n) + 2.0 * n * r.nll_per_site;
  return r;
}

}  // namespace

double sample_quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("empty sample");
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("probability must lie in (0, 1)");
  }
  const double n = static_cast<double>(sorted.size());
  const double h = prob * n - 0.5;  // plotting position (i - 0.5)/N
  if (h <= 0.0) return sorted.front();
  if (h >= n - 1.0) return sorted.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double w = h - std::floor(h);
  return (1.0 - w) * sorted[lo] + w * sorted[lo + 1];
}

double nll(const std::vector<double>& samples, const KappaParams& p) {
  validate_samples(samples, 1);
  p.validate();
  return nll_cached(SampleCache(samples), p);
}

Eigen::Vector3d nll_gradient(const std::vector<double>& samples,
                             const KappaParams& p) {
  validate_samples(samples, 1);
  p.validate();
  return nll_gradient_cached(SampleCache(samples), p);
}

Eigen::Matrix3d nll_hessian(const std::vector<double>& samples,
                            const KappaParams& p) {
  validate_samples(samples, 1);
  p.validate();
  return nll_hessian_cached(SampleCache(samples), p);
}

MarginalFitResult fit_marginal(const std::vector<double>& samples,
                               const FitConfig& cfg) {
  validate_samples(samples, 10);
  if (cfg.kappa_max <= 0.0 || cfg.multistart_count < 1) {
    throw std::invalid_argument("invalid fit configuration");
  }
  const std::set<double> distinct(samples.begin(), samples.end());
  if (distinct.size() <= 2) {
    throw std::invalid_argument(
        "degenerate sample: needs more than two distinct values");
  }

  const SampleCache cache(samples);
  const CommonStats st = common_stats(samples);

  // initial points: the quantile heuristic at kappa_init, the lognormal
  // stationary point, and a spread of kappa values across the box
  std::vector<KappaParams> starts;
  auto heuristic_start = [&](double k0) {
    const double mu0 = ln_kappa(st.median, k0);
    double s0 = sigma_quantile_average(st.sorted, mu0, k0);
    if (!(s0 > 1e-4)) s0 = std::max(st.log_std, 1e-4);
    starts.push_back({mu0, s0, k0});
  };
  heuristic_start(std::min(cfg.kappa_init, cfg.kappa_max));
  starts.push_back({st.log_mean, std::max(st.log_std, 1e-4), 0.0});
  for (int j = 2; j < cfg.multistart_count; ++j) {
    const double frac =
        static_cast<double>(j - 1) / (cfg.multistart_count - 1);
    heuristic_start(frac * cfg.kappa_max);
  }

  Eigen::Vector3d lo(-1e8, 1e-6, 0.0);
  Eigen::Vector3d hi(1e8, 1e8, cfg.kappa_max);
  if (cfg.fix_kappa) {
    lo[2] = hi[2] = *cfg.fix_kappa;
    for (auto& s : starts) s.kappa = *cfg.fix_kappa;
  }

  const GradObjective objective = [&](const Eigen::VectorXd& x,
                                      Eigen::VectorXd& grad) {
    const KappaParams p{x[0], x[1], x[2]};
    grad = nll_gradient_cached(cache, p);
    return nll_cached(cache, p);
  };

  bool any_converged = false;
  double best_f = std::numeric_limits<double>::infinity();
  KappaParams best_params;
  for (const auto& s : starts) {
    Eigen::VectorXd x0(3);
    x0 << s.mu, s.sigma, s.kappa;
    const OptResult r =
        bfgs_box(objective, x0, lo, hi, cfg.tolerance, 500);
    if (r.f < best_f) {
      best_f = r.f;
      best_params = {r.x[0], r.x[1], r.x[2]};
      }
    any_converged = any_converged || r.converged;
  }
  const int k_params = cfg.fix_kappa && *cfg.fix_kappa == 0.0 ? 2 : 3;
  return finalize_fit(cache, best_params, k_params, any_converged);
}

MarginalFitResult fit_quantile(const std::vector<double>& samples,
                               double kappa_max) {
  validate_samples(samples, 100);
  const std::set<double> distinct(samples.begin(), samples.end());
  if (distinct.size() <= 2) {
    throw std::invalid_argument(
        "degenerate sample: needs more than two distinct values");
  }
  const SampleCache cache(samples);
  const CommonStats st = common_stats(samples);

  std::vector<double> q_hat(99);
  for (int m = 1; m <= 99; ++m) {
    q_hat[m - 1] = sample_quantile(st.sorted, 0.01 * m);
  }
  const double z95 = std::numbers::sqrt2 * special::erf_inv(0.9);

  const auto cost = [&](double k) {
    const double mu = ln_kappa(st.median, k);
    double sig = (ln_kappa(q_hat[94], k) - mu) / z95;
    if (!(sig > 1e-8)) sig = 1e-8;
    const KappaParams p{mu, sig, k};
    double ss = 0.0;
    for (int m = 1; m <= 99; ++m) {
      const double d = q_hat[m - 1] - quantile(0.01 * m, p);
      ss += d * d;
    }
    return std::sqrt(ss);
  };

  // coarse scan to bracket the global minimum, then golden-section refine
  const int n_scan = 200;
  int best_i = 0;
  double best_u = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n_scan; ++i) {
    const double u = cost(kappa_max * i / n_scan);
    if (u < best_u) {
      best_u = u;
      best_i = i;
    }
  }
  const double k_lo = kappa_max * std::max(0, best_i - 1) / n_scan;
  const double k_hi = kappa_max * std::min(n_scan, best_i + 1) / n_scan;
  const double k_hat = golden_section(cost, k_lo, k_hi, 1e-10);

  const double mu_hat = ln_kappa(st.median, k_hat);
  double sigma_hat = sigma_quantile_average(st.sorted, mu_hat, k_hat);
  if (!(sigma_hat > 0.0)) {
    throw std::invalid_argument("quantile fit produced non-positive sigma");
  }
  return finalize_fit(cache, {mu_hat, sigma_hat, k_hat}, 3, true);
}

std::vector<ProfilePoint> profile_nll(const std::vector<double>& samples,
                                      const std::vector<double>& kappa_grid) {
  validate_samples(samples, 2);
  const SampleCache cache(samples);
  std::vector<ProfilePoint> curve;
  curve.reserve(kappa_grid.size());
  for (double k : kappa_grid) {
    if (k < 0.0) throw std::domain_error("kappa grid must be non-negative");
    double sum = 0.0;
    std::vector<double> y(cache.log_x.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = k <= kEpsilonKappa ? cache.log_x[i]
                                : std::sinh(k * cache.log_x[i]) / k;
      sum += y[i];
    }
    const double mu = sum / y.size();
    double var = 0.0;
    for (double v : y) var += (v - mu) * (v - mu);
    const double sigma = std::max(std::sqrt(var / y.size()), 1e-12);
    curve.push_back({k, mu, sigma, nll_cached(cache, {mu, sigma, k})});
  }
  return curve;
}

ModelComparison model_select(const std::vector<double>& samples) {
  ModelComparison cmp;
  cmp.kappa_lognormal = fit_marginal(samples);
  FitConfig ln_cfg;
  ln_cfg.fix_kappa = 0.0;
  cmp.lognormal = fit_marginal(samples, ln_cfg);
  return cmp;
}

}  // namespace kappaln

#include "kappaln/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kappaln/distribution.hpp"
#include "kappaln/kappa_functions.hpp"
#include "kappaln/special.hpp"

namespace kappaln {

namespace {

constexpr double kMinSigmaStar = 1e-8;

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

}  // namespace

std::vector<PredictiveMarginal> posterior(const LatentGaussianModel& model,
                                          const SampleSet& train,
                                          const std::vector<Coord>& targets) {
  const std::size_t n = train.values.size();
  if (n == 0 || n != train.coords.size()) {
    throw std::invalid_argument("empty or inconsistent training set");
  }
  const double kappa = model.marginal.kappa;
  Eigen::VectorXd resid(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    resid[static_cast<Eigen::Index>(i)] =
        ln_kappa(train.values[i], kappa) - model.marginal.mu;
  }
  const Eigen::MatrixXd cov =
      cov_matrix(model.kernel, train.coords, model.noise_var);
  const auto llt = factor_with_jitter(cov, kernel_sigma2(model.kernel));
  const Eigen::VectorXd alpha = llt.solve(resid);
  const double prior_var = kernel_sigma2(model.kernel);

  std::vector<PredictiveMarginal> out;
  out.reserve(targets.size());
  Eigen::VectorXd k_star(static_cast<Eigen::Index>(n));
  for (const Coord& t : targets) {
    for (std::size_t i = 0; i < n; ++i) {
      k_star[static_cast<Eigen::Index>(i)] = kernel_eval(
          model.kernel,
          {t[0] - train.coords[i][0], t[1] - train.coords[i][1]});
    }
    PredictiveMarginal pm;
    pm.kappa = kappa;
    pm.mu_star = model.marginal.mu + k_star.dot(alpha);
    const double reduction =
        llt.matrixL().solve(k_star).squaredNorm();
    pm.sigma_star2 = std::max(prior_var - reduction, 0.0);
    out.push_back(pm);
  }
  return out;
}

double predict_median(const PredictiveMarginal& pm) {
  return exp_kappa(pm.mu_star, pm.kappa);
}

double predict_mode(const PredictiveMarginal& pm) {
  const double sigma =
      std::max(std::sqrt(pm.sigma_star2), kMinSigmaStar);
  const KappaParams p{pm.mu_star, sigma, pm.kappa};
  const ModeReport rep = mode_report(p);
  double best_x = rep.modes.front();
  double best_f = pdf(best_x, p);
  for (double x : rep.modes) {
    const double f = pdf(x, p);
    if (f > best_f + 1e-12 * std::fabs(best_f)) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

PredictionInterval prediction_interval(const PredictiveMarginal& pm,
                                       double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  const double sigma =
      std::max(std::sqrt(pm.sigma_star2), kMinSigmaStar);
  const double z =
      std::numbers::sqrt2 * special::erf_inv(1.0 - alpha);
  return {exp_kappa(pm.mu_star - z * sigma, pm.kappa),
          exp_kappa(pm.mu_star + z * sigma, pm.kappa)};
}

CvReport score(const std::vector<double>& predictions,
               const std::vector<double>& truths) {
  const std::size_t n = truths.size();
  if (n == 0 || predictions.size() != n) {
    throw std::invalid_argument("prediction/truth size mismatch");
  }
  CvReport r;
  double sum_truth = 0.0, sum_pred = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = predictions[i] - truths[i];
    r.me += e;
    r.mae += std::fabs(e);
    r.mare += std::fabs(e) / truths[i];
    r.rmse += e * e;
    sum_truth += truths[i];
    sum_pred += predictions[i];
  }
  r.me /= n;
  r.mae /= n;
  r.mare /= n;
  r.rmse = std::sqrt(r.rmse / n);
  const double mean_truth = sum_truth / n;
  r.rrmse = r.rmse / mean_truth;
  const double mean_pred = sum_pred / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = predictions[i] - mean_pred;
    const double dy = truths[i] - mean_truth;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  r.pearson_r = sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return r;
}

ForecastResult forecast(const LatentGaussianModel& model,
                        const SampleSet& train, const SampleSet& test,
                        ForecastStrategy strategy) {
  if (test.values.size() != test.coords.size()) {
    throw std::invalid_argument("inconsistent test set");
  }
  ForecastResult result;
  if (strategy == ForecastStrategy::kMultiStep) {
    result.marginals = posterior(model, train, test.coords);
  } else {
    SampleSet context = train;
    result.marginals.reserve(test.coords.size());
    for (std::size_t i = 0; i < test.coords.size(); ++i) {
      const auto pm = posterior(model, context, {test.coords[i]});
      result.marginals.push_back(pm.front());
      context.coords.push_back(test.coords[i]);
      context.values.push_back(test.values[i]);
    }
  }
  result.predictions.reserve(result.marginals.size());
  for (const auto& pm : result.marginals) {
    result.predictions.push_back(predict_median(pm));
  }
  result.report = score(result.predictions, test.values);
  return result;
}

GridPrediction interpolate_grid(const LatentGaussianModel& model,
                                const SampleSet& train, std::size_t nx,
                                std::size_t ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs >= 2 points");
  double x_lo = train.coords[0][0], x_hi = x_lo;
  double y_lo = train.coords[0][1], y_hi = y_lo;
  for (const auto& c : train.coords) {
    x_lo = std::min(x_lo, c[0]);
    x_hi = std::max(x_hi, c[0]);
    y_lo = std::min(y_lo, c[1]);
    y_hi = std::max(y_hi, c[1]);
  }
  GridPrediction grid;
  grid.xs.resize(nx);
  grid.ys.resize(ny);
  for (std::size_t i = 0; i < nx; ++i) {
    grid.xs[i] = x_lo + (x_hi - x_lo) * i / (nx - 1);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    grid.ys[j] = y_lo + (y_hi - y_lo) * j / (ny - 1);
  }
  std::vector<Coord> targets;
  targets.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      targets.push_back({grid.xs[i], grid.ys[j]});
    }
  }
  const auto pms = posterior(model, train, targets);
  grid.median.reserve(pms.size());
  grid.sigma_star.reserve(pms.size());
  for (const auto& pm : pms) {
    grid.median.push_back(predict_median(pm));
    grid.sigma_star.push_back(std::sqrt(pm.sigma_star2));
  }
  return grid;
}

}  // namespace kappaln

#pragma once

// Warped Gaussian-process regression on the latent field: conditional
// (posterior) latent marginals at unsampled points, point predictions on
// the observable scale (median and mode of the conditional kappa-lognormal),
// prediction intervals, forecasting, leave-out validation metrics, and
// gridded interpolation.

#include <cstddef>
#include <vector>

#include "kappaln/process.hpp"

namespace kappaln {

// Conditional latent Gaussian at one prediction point; the observable there
// follows the kappa-lognormal with these parameters.
struct PredictiveMarginal {
  double mu_star = 0.0;
  double sigma_star2 = 0.0;
  double kappa = 0.0;
};

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Cross-validation / hold-out summary on the observable scale.
struct CvReport {
  double me = 0.0;     // mean error (prediction - truth)
  double mae = 0.0;    // mean absolute error
  double mare = 0.0;   // mean absolute relative error
  double rmse = 0.0;   // root mean squared error
  double rrmse = 0.0;  // rmse / mean of the truths
  double pearson_r = 0.0;
};

enum class ForecastStrategy { kMultiStep, kOneStepRecursive };

/// Conditional latent mean/variance at each target, given the training set
/// under the model.  One covariance factorization shared across targets.
std::vector<PredictiveMarginal> posterior(const LatentGaussianModel& model,
                                          const SampleSet& train,
                                          const std::vector<Coord>& targets);

/// Median of the conditional observable: exp_kappa(mu_star).
double predict_median(const PredictiveMarginal& pm);

/// Global mode of the conditional observable density; the smaller abscissa
/// on ties.
double predict_mode(const PredictiveMarginal& pm);

/// Central (1 - alpha) interval of the conditional observable.
PredictionInterval prediction_interval(const PredictiveMarginal& pm,
                                       double alpha);

/// Predict the observable at test.coords and score against test.values.
/// kMultiStep conditions on the training set only; kOneStepRecursive appends
/// each realized test value before predicting the next point.  Predictions
/// use the conditional median.
struct ForecastResult {
  std::vector<double> predictions;
  std::vector<PredictiveMarginal> marginals;
  CvReport report;
};
ForecastResult forecast(const LatentGaussianModel& model,
                        const SampleSet& train, const SampleSet& test,
                        ForecastStrategy strategy = ForecastStrategy::kMultiStep);

/// Score predictions against truths (both on the observable scale).
CvReport score(const std::vector<double>& predictions,
               const std::vector<double>& truths);

/// Conditional medians on a regular nx-by-ny grid spanning the bounding box
/// of the training coordinates, row-major in y then x.
struct GridPrediction {
  std::vector<double> xs;      // nx grid abscissae
  std::vector<double> ys;      // ny grid ordinates
  std::vector<double> median;  // nx * ny, index j * nx + i
  std::vector<double> sigma_star;  // matching latent std deviations
};
GridPrediction interpolate_grid(const LatentGaussianModel& model,
                                const SampleSet& train, std::size_t nx,
                                std::size_t ny);

}  // namespace kappaln

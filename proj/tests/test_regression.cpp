#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kappaln/distribution.hpp"
#include "kappaln/kappa_functions.hpp"
#include "kappaln/process.hpp"
#include "kappaln/regression.hpp"

using namespace kappaln;

namespace {

LatentGaussianModel series_model() {
  LatentGaussianModel m;
  m.marginal = {1.0, 1.0, 0.8};
  m.kernel = LdhoKernel{1.0, 30.0, 2.0 * std::numbers::pi / 50.0};
  return m;
}

SampleSet draw_series(const LatentGaussianModel& m, int n, double dt,
                      std::uint64_t seed) {
  std::vector<Coord> coords(n);
  for (int i = 0; i < n; ++i) coords[i] = {i * dt, 0.0};
  const Eigen::MatrixXd x = simulate(m, coords, seed, 1);
  SampleSet out;
  out.coords = coords;
  for (int i = 0; i < n; ++i) out.values.push_back(x(0, i));
  return out;
}

}  // namespace

TEST_CASE("single-point conditioning matches the closed form") {
  LatentGaussianModel m;
  m.marginal = {0.5, 1.2, 0.6};
  m.kernel = ExpAnisoKernel{1.44, 8.0, 1.0, 0.0};
  SampleSet train;
  train.coords = {{0.0, 0.0}};
  train.values = {3.7};
  const auto pms = posterior(m, train, {{2.0, 0.0}});
  const double rho = std::exp(-2.0 / 8.0);
  const double y0 = ln_kappa(3.7, 0.6);
  CHECK(pms[0].mu_star ==
        doctest::Approx(0.5 + rho * (y0 - 0.5)).epsilon(1e-12));
  CHECK(pms[0].sigma_star2 ==
        doctest::Approx(1.44 * (1.0 - rho * rho)).epsilon(1e-10));
  CHECK(pms[0].kappa == 0.6);
}

TEST_CASE("posterior interpolates training data exactly without noise") {
  const auto m = series_model();
  const auto train = draw_series(m, 40, 3.0, 5);
  const auto pms = posterior(m, train, train.coords);
  for (std::size_t i = 0; i < pms.size(); ++i) {
    CHECK(predict_median(pms[i]) ==
          doctest::Approx(train.values[i]).epsilon(1e-6));
    CHECK(pms[i].sigma_star2 < 1e-6);
  }
}

TEST_CASE("posterior variance contracts toward data and relaxes far away") {
  const auto m = series_model();
  const auto train = draw_series(m, 60, 2.0, 9);
  const auto pms =
      posterior(m, train, {{30.5, 0.0}, {200.0, 0.0}, {5000.0, 0.0}});
  CHECK(pms[0].sigma_star2 < pms[1].sigma_star2);
  CHECK(pms[1].sigma_star2 < pms[2].sigma_star2);
  // far from all data the conditional reverts to the prior marginal
  CHECK(pms[2].sigma_star2 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pms[2].mu_star == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("predict_mode returns the global maximum of the conditional pdf") {
  PredictiveMarginal pm{1.0, 1.0, 3.0};  // bimodal regime
  const double xm = predict_mode(pm);
  const KappaParams p{1.0, 1.0, 3.0};
  const double fm = pdf(xm, p);
  for (double x = 1e-3; x < 50.0; x *= 1.05) {
    CHECK(pdf(x, p) <= fm * (1.0 + 1e-6));
  }
  // kappa = 0 reduces to the lognormal mode exp(mu - sigma^2)
  PredictiveMarginal ln{0.4, 0.09, 0.0};
  CHECK(predict_mode(ln) ==
        doctest::Approx(std::exp(0.4 - 0.09)).epsilon(1e-8));
  // tiny variance collapses onto the median
  PredictiveMarginal tight{0.7, 0.0, 0.9};
  CHECK(predict_mode(tight) ==
        doctest::Approx(exp_kappa(0.7, 0.9)).epsilon(1e-4));
}

TEST_CASE("prediction interval brackets the median with correct cdf mass") {
  PredictiveMarginal pm{0.8, 0.49, 0.6};
  const auto iv = prediction_interval(pm, 0.05);
  const KappaParams p{0.8, 0.7, 0.6};
  CHECK(cdf(iv.lower, p) == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(cdf(iv.upper, p) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(iv.lower < predict_median(pm));
  CHECK(predict_median(pm) < iv.upper);
  CHECK_THROWS_AS(prediction_interval(pm, 0.0), std::invalid_argument);
}

TEST_CASE("score computes the standard metric algebra") {
  const std::vector<double> pred{2.0, 4.0, 6.0};
  const std::vector<double> truth{1.0, 4.0, 8.0};
  const CvReport r = score(pred, truth);
  CHECK(r.me == doctest::Approx((1.0 + 0.0 - 2.0) / 3.0).epsilon(1e-14));
  CHECK(r.mae == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.mare ==
        doctest::Approx((1.0 + 0.0 + 0.25) / 3.0).epsilon(1e-14));
  CHECK(r.rmse == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
  CHECK(r.rrmse ==
        doctest::Approx(std::sqrt(5.0 / 3.0) / (13.0 / 3.0)).epsilon(1e-14));
  CHECK(r.pearson_r > 0.98);  // collinear up to rounding
}

TEST_CASE("one-step forecasting beats multi-step on a long horizon") {
  const auto m = series_model();
  auto full = draw_series(m, 360, 1.0, 31);
  SampleSet train, test;
  for (int i = 0; i < 300; ++i) {
    train.coords.push_back(full.coords[i]);
    train.values.push_back(full.values[i]);
  }
  for (int i = 300; i < 360; ++i) {
    test.coords.push_back(full.coords[i]);
    test.values.push_back(full.values[i]);
  }
  const auto multi = forecast(m, train, test, ForecastStrategy::kMultiStep);
  const auto one =
      forecast(m, train, test, ForecastStrategy::kOneStepRecursive);
  CHECK(one.report.mae < multi.report.mae);
  CHECK(one.report.pearson_r > 0.5);
  CHECK(multi.predictions.size() == 60);
  // multi-step conditional variance grows with the horizon
  CHECK(multi.marginals.front().sigma_star2 <
        multi.marginals.back().sigma_star2);
  // one-step variance stays near the one-lag conditional level
  CHECK(one.marginals.back().sigma_star2 <
        multi.marginals.back().sigma_star2 + 1e-12);
}

TEST_CASE("interval coverage is near nominal") {
  const auto m = series_model();
  auto full = draw_series(m, 400, 1.0, 77);
  SampleSet train, test;
  for (int i = 0; i < 400; ++i) {
    if (i % 4 == 0) {
      test.coords.push_back(full.coords[i]);
      test.values.push_back(full.values[i]);
    } else {
      train.coords.push_back(full.coords[i]);
      train.values.push_back(full.values[i]);
    }
  }
  const auto pms = posterior(m, train, test.coords);
  int hits = 0;
  for (std::size_t i = 0; i < pms.size(); ++i) {
    const auto iv = prediction_interval(pms[i], 0.05);
    if (test.values[i] >= iv.lower && test.values[i] <= iv.upper) ++hits;
  }
  const double coverage = double(hits) / pms.size();
  CHECK(coverage > 0.88);
  CHECK(coverage <= 1.0);
}

TEST_CASE("grid interpolation covers the bounding box") {
  LatentGaussianModel m;
  m.marginal = {0.0, 1.0, 0.5};
  m.kernel = ExpAnisoKernel{1.0, 4.0, 1.0, 0.0};
  SampleSet train;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      train.coords.push_back({2.0 * i, 2.0 * j});
    }
  }
  const Eigen::MatrixXd x = simulate(m, train.coords, 13, 1);
  for (Eigen::Index i = 0; i < x.cols(); ++i) train.values.push_back(x(0, i));
  const auto grid = interpolate_grid(m, train, 15, 15);
  CHECK(grid.xs.front() == 0.0);
  CHECK(grid.xs.back() == 14.0);
  CHECK(grid.median.size() == 225);
  CHECK(grid.sigma_star.size() == 225);
  // grid nodes coincide with every other training site: exact there
  CHECK(grid.median[0] == doctest::Approx(train.values[0]).epsilon(1e-6));
  for (double v : grid.median) CHECK(v > 0.0);
}

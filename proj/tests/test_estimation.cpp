#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kappaln/estimation.hpp"
#include "kappaln/kappa_functions.hpp"
#include "kappaln/rng.hpp"

using namespace kappaln;

namespace {

std::vector<double> draw_samples(const KappaParams& p, int n,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = exp_kappa(p.mu + p.sigma * rng.normal(), p.kappa);
  }
  return x;
}

}  // namespace

TEST_CASE("nll closed-form anchors") {
  // single sample at x = 1: both power terms equal 1, ln_k(1) = 0
  const std::vector<double> one{1.0};
  CHECK(nll(one, {0.0, 1.0, 0.7}) ==
        doctest::Approx(0.9189385332046727).epsilon(1e-14));
  // kappa = 0 reduces to the lognormal NLL
  const std::vector<double> x{0.5, 1.3, 2.0, 4.7};
  const KappaParams p{0.4, 0.9, 0.0};
  double expected = std::log(std::sqrt(2.0 * M_PI) * p.sigma);
  for (double xi : x) {
    const double d = std::log(xi) - p.mu;
    expected += d * d / (2.0 * x.size() * p.sigma * p.sigma) +
                std::log(xi) / x.size();
  }
  CHECK(nll(x, p) == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(nll({1.0, -2.0}, p), std::domain_error);
}

TEST_CASE("nll at the truth for permeability-like synthetic data") {
  const KappaParams truth{8.26, 1.37, 0.56};
  const auto x = draw_samples(truth, 1600, 17);
  CHECK(nll(x, truth) == doctest::Approx(4.16).epsilon(0.025));
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const KappaParams p{rng.normal(), 0.5 + rng.uniform() * 1.5,
                        0.1 + rng.uniform() * 2.5};
    const auto x = draw_samples({0.3, 0.8, 1.0}, 40, 100 + rep);
    const auto g = nll_gradient(x, p);
    const double h = 1e-6;
    const double fd_mu = (nll(x, {p.mu + h, p.sigma, p.kappa}) -
                          nll(x, {p.mu - h, p.sigma, p.kappa})) / (2 * h);
    const double fd_sg = (nll(x, {p.mu, p.sigma + h, p.kappa}) -
                          nll(x, {p.mu, p.sigma - h, p.kappa})) / (2 * h);
    const double fd_kp = (nll(x, {p.mu, p.sigma, p.kappa + h}) -
                          nll(x, {p.mu, p.sigma, p.kappa - h})) / (2 * h);
    const double scale = 1.0 + g.norm();
    CHECK(std::fabs(g[0] - fd_mu) <= 1e-5 * scale);
    CHECK(std::fabs(g[1] - fd_sg) <= 1e-5 * scale);
    CHECK(std::fabs(g[2] - fd_kp) <= 1e-5 * scale);
  }
}

TEST_CASE("the lognormal moment-matched point is a stationary point") {
  const auto x = draw_samples({1.0, 0.7, 0.9}, 200, 7);
  double mean = 0.0;
  for (double xi : x) mean += std::log(xi);
  mean /= x.size();
  double var = 0.0;
  for (double xi : x) var += std::pow(std::log(xi) - mean, 2);
  const KappaParams stationary{mean, std::sqrt(var / x.size()), 0.0};
  CHECK(nll_gradient(x, stationary).norm() <= 1e-10);
}

TEST_CASE("hessian matches finite differences of the gradient") {
  Rng rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const KappaParams p{rng.normal(), 0.5 + rng.uniform() * 1.5,
                        0.2 + rng.uniform() * 2.0};
    const auto x = draw_samples({0.3, 0.8, 1.0}, 40, 200 + rep);
    const auto h_an = nll_hessian(x, p);
    CHECK(h_an(0, 0) == doctest::Approx(1.0 / (p.sigma * p.sigma)).epsilon(1e-12));
    CHECK((h_an - h_an.transpose()).norm() == 0.0);
    const double h = 1e-5;
    Eigen::Matrix3d h_fd;
    const auto perturb = [&](int j, double eps) {
      KappaParams q = p;
      if (j == 0) q.mu += eps;
      if (j == 1) q.sigma += eps;
      if (j == 2) q.kappa += eps;
      return nll_gradient(x, q);
    };
    for (int j = 0; j < 3; ++j) {
      h_fd.col(j) = (perturb(j, h) - perturb(j, -h)) / (2 * h);
    }
    CHECK((h_an - h_fd).norm() <= 1e-4 * (1.0 + h_an.norm()));
  }
}

TEST_CASE("fit_marginal recovers parameters on single realizations") {
  const KappaParams model_a{1.0, 1.0, 3.0};
  const auto xa = draw_samples(model_a, 1000, 1);
  const auto fa = fit_marginal(xa);
  CHECK(fa.converged);
  CHECK(fa.params.mu == doctest::Approx(1.0).epsilon(0.25));
  CHECK(fa.params.sigma == doctest::Approx(1.0).epsilon(0.25));
  CHECK(fa.params.kappa == doctest::Approx(3.0).epsilon(0.15));
  CHECK(fa.gradient_norm <= 1e-6);

  const KappaParams model_b{1.0, 0.5, 0.5};
  const auto xb = draw_samples(model_b, 1000, 2);
  const auto fb = fit_marginal(xb);
  CHECK(fb.params.mu == doctest::Approx(1.0).epsilon(0.15));
  CHECK(fb.params.sigma == doctest::Approx(0.5).epsilon(0.25));
  CHECK(fb.params.kappa == doctest::Approx(0.5).epsilon(0.5));

  // AIC/BIC bookkeeping
  const double n = 1000.0;
  CHECK(fa.aic == doctest::Approx(6.0 + 2.0 * n * fa.nll_per_site));
  CHECK(fa.bic == doctest::Approx(3.0 * std::log(n) + 2.0 * n * fa.nll_per_site));
}

TEST_CASE("fit_marginal rejects degenerate data") {
  std::vector<double> flat(50, 2.0);
  CHECK_THROWS_AS(fit_marginal(flat), std::invalid_argument);
}

TEST_CASE("fit_quantile recovers exact model quantiles") {
  const KappaParams truth{1.0, 0.5, 0.5};
  const int n = 100000;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = quantile((i + 0.5) / n, truth);
  }
  const auto fit = fit_quantile(x);
  CHECK(fit.params.mu == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.params.sigma == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.params.kappa == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("fit_quantile on sampled data stays near the truth") {
  const auto x = draw_samples({1.0, 1.0, 3.0}, 1000, 3);
  const auto fit = fit_quantile(x);
  CHECK(fit.params.mu == doctest::Approx(1.0).epsilon(0.3));
  CHECK(fit.params.sigma == doctest::Approx(1.0).epsilon(0.3));
  CHECK(fit.params.kappa == doctest::Approx(3.0).epsilon(0.2));
}

TEST_CASE("profile_nll properties") {
  const auto x = draw_samples({8.26, 1.37, 0.56}, 1600, 5);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.025 * i);
  const auto curve = profile_nll(x, grid);
  REQUIRE(curve.size() == grid.size());

  // kappa = 0 entry equals the closed-form lognormal MLE NLL
  double mean = 0.0;
  for (double xi : x) mean += std::log(xi);
  mean /= x.size();
  double var = 0.0;
  for (double xi : x) var += std::pow(std::log(xi) - mean, 2);
  const double ln_nll =
      nll(x, {mean, std::sqrt(var / x.size()), 0.0});
  CHECK(curve.front().nll == doctest::Approx(ln_nll).epsilon(1e-12));

  // argmin near the generating kappa
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].nll < curve[best].nll) best = i;
  }
  CHECK(curve[best].kappa >= 0.45);
  CHECK(curve[best].kappa <= 0.65);

  // the profile curve sits above the full MLE pointwise
  const auto mle = fit_marginal(x);
  for (const auto& pt : curve) {
    CHECK(pt.nll >= mle.nll_per_site - 1e-9);
  }
}

TEST_CASE("model_select separates the nested models") {
  const auto heavy = draw_samples({1.0, 1.0, 3.0}, 1000, 11);
  const auto cmp = model_select(heavy);
  CHECK(cmp.kappa_lognormal.bic + 10.0 < cmp.lognormal.bic);

  const auto gaussian_log = draw_samples({0.0, 1.0, 0.0}, 1000, 12);
  const auto cmp2 = model_select(gaussian_log);
  CHECK(cmp2.lognormal.bic < cmp2.kappa_lognormal.bic);
  CHECK(cmp2.kappa_lognormal.params.kappa <= 0.05);
  // nested models nearly coincide when kappa-hat ~ 0
  CHECK(cmp2.kappa_lognormal.nll_per_site ==
        doctest::Approx(cmp2.lognormal.nll_per_site).epsilon(1e-4));
}

TEST_CASE("MLE is tighter than quantile fitting over a small ensemble") {
  const KappaParams truth{1.0, 0.5, 0.5};
  double var_mle = 0.0, var_qf = 0.0;
  const int reps = 12;
  for (int r = 0; r < reps; ++r) {
    const auto x = draw_samples(truth, 1000, 500 + r);
    const auto mle = fit_marginal(x);
    const auto qf = fit_quantile(x);
    var_mle += std::pow(mle.params.kappa - truth.kappa, 2);
    var_qf += std::pow(qf.params.kappa - truth.kappa, 2);
  }
  CHECK(var_mle <= var_qf * 1.5);
}

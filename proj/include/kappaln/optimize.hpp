#pragma once

// Small deterministic optimizers used by the fitting routines: projected
// BFGS for box-constrained smooth objectives with analytic gradients,
// Nelder-Mead for derivative-free kernel fits, and golden-section search
// for univariate costs.

#include <Eigen/Dense>
#include <functional>

namespace kappaln {

struct OptResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;  // projected-gradient norm (BFGS only)
  bool converged = false;
  int iterations = 0;
};

/// Objective returning f(x) and filling grad (same size as x).
using GradObjective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// BFGS with box projection and Armijo backtracking.  Convergence when the
/// projected-gradient norm drops below tol.
OptResult bfgs_box(const GradObjective& objective, Eigen::VectorXd x0,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                   double tol = 1e-8, int max_iter = 500);

/// Nelder-Mead simplex; step sets the initial simplex edge per coordinate.
OptResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                      Eigen::VectorXd x0, const Eigen::VectorXd& step,
                      double tol = 1e-10, int max_iter = 2000);

/// Golden-section minimum of a unimodal f on [a, b].
double golden_section(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-8);

}  // namespace kappaln

#include "kappaln/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace kappaln {

namespace {

Eigen::VectorXd clamp_box(Eigen::VectorXd x, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
  return x;
}

// Norm of the projected gradient: component dropped when it pushes against
// an active bound.
double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                           const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi) {
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lo = x[i] <= lo[i] && g[i] > 0.0;
    const bool at_hi = x[i] >= hi[i] && g[i] < 0.0;
    if (!at_lo && !at_hi) norm2 += g[i] * g[i];
  }
  return std::sqrt(norm2);
}

}  // namespace

OptResult bfgs_box(const GradObjective& objective, Eigen::VectorXd x0,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                   double tol, int max_iter) {
  const Eigen::Index n = x0.size();
  Eigen::VectorXd x = clamp_box(std::move(x0), lower, upper);
  Eigen::VectorXd g(n), g_new(n);
  double f = objective(x, g);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

  OptResult result;
  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter;
    const double pg = projected_grad_norm(x, g, lower, upper);
    if (pg <= tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd dir = -(h_inv * g);
    if (dir.dot(g) >= 0.0) {  // not a descent direction: reset
      h_inv.setIdentity();
      dir = -g;
    }

    // Armijo backtracking on the projected path
    double step = 1.0;
    double f_new = f;
    Eigen::VectorXd x_new = x;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = clamp_box(x + step * dir, lower, upper);
      const Eigen::VectorXd dx = x_new - x;
      if (dx.norm() == 0.0) break;
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(dx)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // no further progress possible along this direction
      result.converged = pg <= std::max(tol, 1e-6 * (1.0 + std::fabs(f)));
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
               (hy * s.transpose() + s * hy.transpose()) / sy;
    } else {
      h_inv.setIdentity();
    }
    x = x_new;
    g = g_new;
    f = f_new;
  }
  result.x = x;
  result.f = f;
  result.grad_norm = projected_grad_norm(x, g, lower, upper);
  if (result.grad_norm <= tol) result.converged = true;
  return result;
}

OptResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                      Eigen::VectorXd x0, const Eigen::VectorXd& step,
                      double tol, int max_iter) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.push_back(x0);
  vals.push_back(f(x0));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = x0;
    p[i] += step[i] != 0.0 ? step[i] : 1e-3;
    pts.push_back(p);
    vals.push_back(f(p));
  }

  auto order = [&]() {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      for (std::size_t j = i; j > 0 && vals[j] < vals[j - 1]; --j) {
        std::swap(vals[j], vals[j - 1]);
        std::swap(pts[j], pts[j - 1]);
      }
    }
  };
  order();

  OptResult result;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (std::fabs(vals.back() - vals.front()) <=
        tol * (1.0 + std::fabs(vals.front()))) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd refl = centroid + (centroid - pts.back());
    const double f_refl = f(refl);
    if (f_refl < vals.front()) {
      const Eigen::VectorXd expd = centroid + 2.0 * (centroid - pts.back());
      const double f_expd = f(expd);
      if (f_expd < f_refl) {
        pts.back() = expd;
        vals.back() = f_expd;
      } else {
        pts.back() = refl;
        vals.back() = f_refl;
      }
    } else if (f_refl < vals[vals.size() - 2]) {
      pts.back() = refl;
      vals.back() = f_refl;
    } else {
      const Eigen::VectorXd contr =
          centroid + 0.5 * (pts.back() - centroid);
      const double f_contr = f(contr);
      if (f_contr < vals.back()) {
        pts.back() = contr;
        vals.back() = f_contr;
      } else {  // shrink toward the best point
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = pts.front() + 0.5 * (pts[i] - pts.front());
          vals[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  result.x = pts.front();
  result.f = vals.front();
  result.iterations = iter;
  return result;
}

double golden_section(const std::function<double(double)>& f, double a,
                      double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace kappaln

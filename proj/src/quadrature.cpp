#include "kappaln/quadrature.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace kappaln {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre polynomial.
template <int N>
struct GaussRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussRule() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

template <int N>
double panel(const std::function<double(double)>& f, double a, double b) {
  static const GaussRule<N> rule;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double abs_tol, int depth) {
  const double coarse = panel<15>(f, a, b);
  const double fine = panel<31>(f, a, b);
  if (std::fabs(fine - coarse) <= abs_tol || depth >= 24) return fine;
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * abs_tol, depth + 1) +
         adapt(f, mid, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  const double rough = std::fabs(panel<31>(f, a, b));
  const double abs_tol = rel_tol * (rough > 0.0 ? rough : 1.0);
  return adapt(f, a, b, abs_tol, 0);
}

}  // namespace kappaln

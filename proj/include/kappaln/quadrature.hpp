#pragma once

// Adaptive Gauss-Legendre panel integration.

#include <functional>

namespace kappaln {

/// Integrates f over [a, b] by bisecting Gauss-Legendre panels until the
/// 15- vs 31-point estimates agree to rel_tol (relative to the running
/// total). Depth-limited; accurate for smooth integrands.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

}  // namespace kappaln

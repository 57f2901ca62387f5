#pragma once

// Special functions backing the moment bounds and quantile machinery:
// error function, its inverse, the Gamma function and the confluent
// hypergeometric (Kummer) function 1F1.

#include <stdexcept>

namespace kappaln::special {

/// erf(x) = (2/sqrt(pi)) * integral_0^x exp(-t^2) dt.
double erf(double x);

/// Complementary error function, accurate in the deep tail.
double erfc(double x);

/// Inverse of erf on (-1, 1). Throws std::domain_error for |p| >= 1.
/// Accuracy: |erf(erf_inv(p)) - p| <= 1e-15 over (-1+eps, 1-eps).
double erf_inv(double p);

/// Gamma function. Throws std::domain_error at non-positive integers.
double gamma(double x);

struct HypergeometricParams {
  double a;  // numerator parameter
  double b;  // denominator parameter, must not be a non-positive integer
  double z;  // argument
};

/// Kummer confluent hypergeometric M(a, b, z) = sum_n (a)_n z^n / ((b)_n n!).
/// Taylor series with term-ratio stopping for z >= 0; the Kummer
/// transformation M(a,b,z) = e^z M(b-a, b, -z) handles z < 0.
/// Throws std::domain_error if b is a non-positive integer and
/// std::runtime_error if the series fails to converge.
double hyp1f1(double a, double b, double z);

inline double hyp1f1(const HypergeometricParams& p) { return hyp1f1(p.a, p.b, p.z); }

}  // namespace kappaln::special

#pragma once

#include "fraclap/errors.hpp"

namespace fraclap {

/// Gamma function for real x (Lanczos approximation, g=7, 9 coefficients;
/// reflection formula for x < 0.5).  Accurate to ~14 significant digits on
/// the positive axis, which is well beyond the 12 digits the normalization
/// constant needs.
double gamma_fn(double x);

/// Natural log of |Gamma(x)| for x > 0, used where Gamma itself would overflow.
double log_gamma(double x);

/// Normalization constant of the Riesz fractional gradient,
///   mu(N,s) = 2^s Gamma((N+s+1)/2) / (pi^{N/2} Gamma((1-s)/2)).
/// Requires N >= 1 and s in (0,1).
double mu(int dim, double s);

/// mu(N,s) together with the parameters it was built from.
struct FracConstant {
  int dim;
  double order;
  double value;
};

FracConstant frac_constant(int dim, double s);

}  // namespace fraclap

#pragma once

#include <functional>

namespace fraclap {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
/// Suitable for integrands that are smooth except for mild kinks.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol);

/// Adaptive tanh-sinh (double-exponential) integration of f over (a, b),
/// robust to integrable algebraic singularities at either endpoint.  The
/// level is doubled until two successive refinements agree to tol.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace fraclap

#pragma once

#include <vector>

#include "fraclap/grid.hpp"

namespace fraclap {

/// |v_h - 2v + v_{-h}|_{L^p(Omega_{|h|})} with the exact re-indexed second
/// difference; h must be a positive node multiple smaller than a.
double second_difference_norm(const DiscreteFunction& v, double p, double h);

/// Difference-quotient Besov seminorm over the interval (-rho_ball, rho_ball):
///   q < inf : ( q sigma (2-sigma) * 2 * sum_h dh D(h)^q / h^{1 + q sigma} )^{1/q}
///   q = inf : max_h D(h) / h^sigma
/// over node-multiple h in [4 dx, rho_ball]; the factor 2 folds the two signs
/// of h by the symmetry of the second difference, and steps below 4 dx are
/// dropped as resolution-limited (the same floor the probe applies).  Pass
/// q = infinity for the sup form.  Requires sigma in (0,2), q >= 1, rho_ball < a.
double besov_seminorm(const DiscreteFunction& v, double p, double q, double sigma, double rho_ball);

/// Sampled second-difference norms over dyadic steps, largest first.
struct BesovProbe {
  double p = 2.0;
  std::vector<double> h;        // strictly decreasing, dyadic
  std::vector<double> values;   // D(h_k) >= 0
  double h_min = 0.0;           // effective fit window
  double h_max = 0.0;
  double vnorm = 1.0;           // |v|_{L^p(Omega)}, zero-floor reference
  double predicted = -1.0;      // optional predicted exponent (< 0: none)
};

/// Probes v at dyadic h = a 2^{-k} inside [h_min_request, h_max_request],
/// keeping node multiples with h >= 4 dx (below that the discrete second
/// difference is resolution-limited).
BesovProbe probe_function(const DiscreteFunction& v, double p, double h_min_request,
                          double h_max_request);

struct ExponentFit {
  double slope = 0.0;
  double residual = 0.0;  // RMS residual in log-log
  int npoints = 0;
};

/// Least-squares slope of log D(h) against log h.  Points with
/// D <= 1e-14 * vnorm are excluded as zero; fewer than 4 usable points is a
/// measurement error.
ExponentFit fit_exponent(const BesovProbe& probe);

}  // namespace fraclap

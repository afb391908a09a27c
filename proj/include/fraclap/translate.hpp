#pragma once

#include <span>
#include <vector>

#include "fraclap/fracgrad.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

/// Cut-off with fixed quintic smoothstep profile: identically 1 on
/// D_rho(x0), identically 0 outside D_{2rho}(x0), C^2 ramp in between.
/// The Lipschitz constant is analytic: sup |phi'| = 15/(8 rho).
class Cutoff {
 public:
  Cutoff(double center, double radius, const Grid& grid);

  double center() const { return center_; }
  double radius() const { return radius_; }
  double lip_const() const { return lip_; }
  double sup_norm() const { return 1.0; }
  /// max(sup|phi|, sup|phi'|), the W^{1,inf} size used in proof constants.
  double w1inf_norm() const { return lip_ > 1.0 ? lip_ : 1.0; }

  std::span<const double> samples() const { return samples_; }
  double operator[](int j) const { return samples_[static_cast<size_t>(j)]; }

  /// Analytic profile value anywhere.
  double value(double x) const;

 private:
  double center_;
  double radius_;
  double lip_;
  std::vector<double> samples_;
};

Cutoff make_cutoff(double center, double radius, const Grid& grid);

/// Admissible localized-translation steps at (x0, rho): node multiples h with
/// |h| < rho such that (D_{2rho}(x0) \ Omega) + t h stays in the closed
/// exterior for t in {0, 1/4, 1/2, 3/4, 1}, checked on the grid nodes of the
/// excluded set.  0 is always admissible.
struct DirectionSet {
  double center;
  double radius;
  std::vector<int> steps;  // signed node multiples, ascending, contains 0

  bool contains(int step) const;
};

DirectionSet admissible_directions(const Grid& grid, double center, double radius);

/// T_h v = phi v_h + (1 - phi) v with v_h(x) = v(x + h) (zero extension) as a
/// raw nodal field; h must be a node multiple.  For inadmissible h the result
/// carries nonzero exterior values and is not a member of the zero-trace space.
std::vector<double> localized_translate_nodal(const DiscreteFunction& v, double h,
                                              const Cutoff& phi);

/// The same as a zero-trace function; callers assert membership of the
/// zero-trace space, so a violated exterior node raises an admissibility error.
DiscreteFunction localized_translate(const DiscreteFunction& v, double h, const Cutoff& phi);

/// Commutator C_{phi,v}(x_k) = mu int (phi(x_k) - phi(y)) (v_h - v)(y)
/// sgn(x_k - y)|x_k - y|^{-1-s} dy at the window nodes, using the same
/// hat-function cell weights as the gradient operator.
std::vector<double> commutator(const Cutoff& phi, const DiscreteFunction& v, double h,
                               const FracGradOperator& op);

struct CommutatorBound {
  double ratio;  // |C|_p / |v_h - v|_p
  double bound;  // explicit proof constant K at R = 1
};

/// Measured commutator ratio together with the proof constant
/// K = mu(1,s) * [ w0/(1-s) |phi|_{W^{1,inf}} + 2 |phi|_inf w0/s ], w0 = 2.
CommutatorBound commutator_bound_ratio(const Cutoff& phi, const DiscreteFunction& v, double h,
                                       const FracGradOperator& op, double p);

}  // namespace fraclap

#pragma once

#include <span>
#include <vector>

#include "fraclap/gamma.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

/// Dense realization of the Riesz fractional gradient of order s on a grid,
/// collocated at the window nodes.
///
/// Row k applies mu(1,s) * int (v(x_k) - v(y)) sgn(x_k - y) |x_k - y|^{-1-s} dy
/// to the piecewise-linear interpolant of nodal v, with every cell integrated
/// in closed form through the antiderivatives of |t|^{-s} and |t|^{1-s}.  The
/// v(x_k) * int kernel term cancels by principal-value antisymmetry.  On a
/// uniform lattice the entries collapse to an antisymmetric Toeplitz matrix
///   G_{kj} = mu dx^{-s} sgn(k-j) * d2((|k-j|)^{1-s}) / (s(1-s)),
/// where d2 is the unit second difference m -> (m+1)^{1-s} - 2m^{1-s} + (m-1)^{1-s}.
class FracGradOperator {
 public:
  static FracGradOperator assemble(const Grid& grid, double s);

  const Grid& grid() const { return grid_; }
  double order() const { return s_; }
  double normalization() const { return mu_; }
  int size() const { return grid_.n_nodes(); }

  /// Row-major dense matrix, size() x size().
  const std::vector<double>& dense() const { return dense_; }
  double entry(int k, int j) const { return dense_[static_cast<size_t>(k) * size() + j]; }

  /// Signed generator: entry(k, j) == generator(k - j).
  double generator(int offset) const;

  /// Hat-function kernel weight W_{kj} = int hat_j(y) sgn(x_k - y)|x_k - y|^{-1-s} dy,
  /// shared with the commutator quadrature; entry(k,j) = -mu * W_{kj}.
  double hat_weight(int k, int j) const { return -entry(k, j) / mu_; }

  /// grad^s v at every window node.
  std::vector<double> apply(const DiscreteFunction& v) const;
  std::vector<double> apply_nodal(std::span<const double> v) const;

  /// y[r] = sum_c G[row_first + r][col_first + c] x[c], r < row_count, c < col_count.
  void apply_block(std::span<const double> x, int row_first, int row_count, int col_first,
                   int col_count, double* y) const;

  // Midpoint collocation of the same closed-form cell integration, used for
  // the energy quadrature: nodal sampling lands exactly on the |x - x_j|^{1-s}
  // cusps of grad^s(PL v) and degrades the minimization to O(dx^{1/2}); the
  // cell midpoints sample between the kinks.
  int midpoint_count() const { return grid_.n_cells(); }
  double midpoint(int k) const { return grid_.node(k) + 0.5 * grid_.dx(); }
  /// grad^s v at every cell midpoint.
  std::vector<double> apply_midpoint(std::span<const double> v) const;
  /// y[r] = sum_c Gm[row_first + r][col_first + c] x[c] on the midpoint rows.
  void apply_midpoint_block(std::span<const double> x, int row_first, int row_count, int col_first,
                            int col_count, double* y) const;
  /// y[r] = sum_c Gm^T[row_first + r][col_first + c] x[c] (node rows, midpoint columns).
  void apply_midpoint_transpose_block(std::span<const double> x, int row_first, int row_count,
                                      int col_first, int col_count, double* y) const;
  /// Gm entry at midpoint row k, node column j.
  double midpoint_entry(int k, int j) const;

  /// Discrete adjoint-convention divergence: the w with
  /// <w, v>_M = -<phi, G v>_M for all nodal v (M = window trapezoid weights).
  std::vector<double> apply_divergence(std::span<const double> phi) const;

  /// Window trapezoid weights used by the adjoint convention.
  const std::vector<double>& window_weights() const { return mass_; }

 private:
  FracGradOperator(Grid grid, double s);

  Grid grid_;
  double s_;
  double mu_;
  std::vector<double> gen_;        // generator magnitudes, index |k-j|
  std::vector<double> gen_mid_;    // midpoint generator, offset q + 1/2 at index q
  std::vector<double> dense_;      // row-major, nodes x nodes
  std::vector<double> dense_mid_;  // midpoints x nodes
  std::vector<double> dense_mid_t_;  // nodes x midpoints (transpose layout)
  std::vector<double> mass_;       // window trapezoid weights
};

/// div_s Phi at every node via independent row-wise adaptive quadrature of the
/// defining integral (per-cell adaptive Simpson, tanh-sinh on the singular
/// cells, analytic tails beyond the window).  Deliberately does not reuse the
/// closed-form antiderivatives, so it can serve as the non-tautological side
/// of the duality check.
std::vector<double> apply_divergence_adaptive(const Grid& grid, double s,
                                              std::span<const double> phi, double tol = 1e-10);

struct DualityResult {
  double defect;
  bool tail_warning;  // support touches the window boundary
};

/// | int phi div_s Phi + int Phi grad^s phi | / (|phi|_2 |Phi|_2 + eps), with
/// div_s from the adaptive route and grad^s from the closed form.
DualityResult duality_defect(const Grid& grid, double s, const DiscreteFunction& phi,
                             std::span<const double> big_phi);

/// Empirical constant of the pointwise bound
///   max_x |grad^s phi(x)| / [ ((1-s)/s)^{1-s} |phi|_inf^{1-s} |phi'|_inf^s ].
/// Returns 0 for constant profiles (lip_const == 0).
double pointwise_bound_ratio(const FracGradOperator& op, const DiscreteFunction& phi,
                             double sup_norm, double lip_const);

}  // namespace fraclap

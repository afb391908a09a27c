#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap {

/// Uniform 1-D lattice on the window [-L, L] carrying the domain
/// Omega = (-a, a).  Nodes are x_j = -L + j*dx, j = 0..n_cells, symmetric
/// about 0, and the constructor guarantees that +-a land exactly on nodes.
class Grid {
 public:
  Grid(double window_half_width, double domain_half_width, int n_cells);

  double window_half_width() const { return window_half_width_; }
  double domain_half_width() const { return domain_half_width_; }
  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_cells_ + 1; }
  double dx() const { return dx_; }

  double node(int j) const { return -window_half_width_ + j * dx_; }

  /// Index of the node nearest to x (no range check beyond the window).
  int nearest_index(double x) const;

  /// Index of the node at -a (left edge of Omega) and +a.
  int domain_left_index() const { return domain_left_; }
  int domain_right_index() const { return domain_right_; }

  /// True when x_j lies in the closed exterior |x_j| >= a, where members of
  /// the zero-trace space must vanish.
  bool exterior_node(int j) const { return j <= domain_left_ || j >= domain_right_; }

  /// Signed node multiple m with h = m*dx, or throws if h is not one.
  int step_of(double h) const;

  bool same_as(const Grid& other) const;

 private:
  double window_half_width_;
  double domain_half_width_;
  int n_cells_;
  double dx_;
  int domain_left_;
  int domain_right_;
};

Grid build_grid(double window_half_width, double domain_half_width, int n_cells);

enum class RegionKind { interior, dilation, interval };

/// Contiguous node-index range [first, last] resolved on a grid.
/// Interior parallel sets Omega_lambda snap to subsets of the open interval
/// (-a+lambda, a-lambda) for lambda > 0; dilations Omega^lambda snap to
/// supersets of [-a-lambda, a+lambda] clipped to the window, so the
/// monotonicity inclusions hold exactly on index sets.
struct Region {
  RegionKind kind;
  double lambda;
  int first;
  int last;

  int node_count() const { return last - first + 1; }
};

/// Omega_lambda.  lambda = 0 yields the closed node range [-a, a] (Omega as an
/// integration domain); lambda >= a is an error (empty region).
Region inner_region(const Grid& grid, double lambda);

/// Omega^lambda intersected with the window.
Region outer_region(const Grid& grid, double lambda);

/// Explicit closed interval [lo, hi], snapped outward and clipped.
Region interval_region(const Grid& grid, double lo, double hi);

/// The full window [-L, L].
Region window_region(const Grid& grid);

/// Nodal values with enforced zero exterior trace (v_j = 0 whenever
/// |x_j| >= a); interpreted as the piecewise-linear interpolant.
class DiscreteFunction {
 public:
  /// Wraps nodal data.  With enforce_exterior_zero the exterior entries are
  /// overwritten by 0; otherwise they must already be exactly 0.
  DiscreteFunction(const Grid& grid, std::vector<double> values, bool enforce_exterior_zero = false);

  static DiscreteFunction zero(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](int j) const { return values_[static_cast<size_t>(j)]; }
  int size() const { return static_cast<int>(values_.size()); }

  /// Piecewise-linear evaluation anywhere (0 outside the window).
  double interpolate(double x) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Samples f at every node; with the flag set, nodes with |x_j| >= a are
/// forced to 0.  Non-finite samples are an input error.
DiscreteFunction sample(const std::function<double(double)>& f, const Grid& grid,
                        bool enforce_exterior_zero);

/// Nodal samples of f over the full window without any trace handling.
std::vector<double> sample_nodal(const std::function<double(double)>& f, const Grid& grid);

/// Re-indexed translation (v_h)_j = v_{j+m} with zero shift-in, the exact
/// nodal realization of v_h(x) = v(x + m*dx) for compactly supported v.
std::vector<double> shifted(std::span<const double> values, int steps);

/// Trapezoid quadrature weights of a region: dx at interior nodes, dx/2 at
/// the region's end nodes (0 for a single-node region).
std::vector<double> trapezoid_weights(const Grid& grid, const Region& region);

/// (sum_region w_j |v_j|^p)^{1/p} with trapezoid weights, fixed summation
/// order.  Requires p >= 1.
double lp_norm(std::span<const double> values, double p, const Grid& grid, const Region& region);
double lp_norm(const DiscreteFunction& v, double p, const Region& region);

}  // namespace fraclap

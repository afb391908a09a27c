#include "fraclap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fraclap {

namespace {

constexpr double kSnapTol = 1e-9;

bool is_integral(double t, double tol = kSnapTol) { return std::abs(t - std::round(t)) <= tol * std::max(1.0, std::abs(t)); }

// Smallest even n >= n_request such that a lands on a node of the n-cell grid.
int smallest_compatible_cells(double L, double a, int n_request) {
  int n = std::max(2, n_request + (n_request % 2));
  for (; n <= 1 << 24; n += 2) {
    double ratio = a * n / (2.0 * L);
    if (is_integral(ratio)) return n;
  }
  return -1;
}

}  // namespace

Grid::Grid(double window_half_width, double domain_half_width, int n_cells)
    : window_half_width_(window_half_width),
      domain_half_width_(domain_half_width),
      n_cells_(n_cells) {
  if (!(window_half_width > 0.0) || !(domain_half_width > 0.0))
    throw parameter_error("Grid: lengths must be positive");
  if (!(domain_half_width < window_half_width))
    throw parameter_error("Grid: domain half-width a must be smaller than window half-width L");
  if (n_cells < 2) throw parameter_error("Grid: need at least 2 cells");
  if (n_cells % 2 != 0) {
    int suggestion = smallest_compatible_cells(window_half_width, domain_half_width, n_cells);
    throw parameter_error("Grid: n_cells must be even; smallest compatible n_cells is " +
                          std::to_string(suggestion));
  }
  dx_ = 2.0 * window_half_width / n_cells;
  double a_steps = domain_half_width / dx_;
  if (!is_integral(a_steps)) {
    int suggestion = smallest_compatible_cells(window_half_width, domain_half_width, n_cells);
    throw parameter_error(
        "Grid: domain boundary a does not land on a node (a/dx = " + std::to_string(a_steps) +
        "); smallest compatible n_cells is " + std::to_string(suggestion));
  }
  int half = n_cells / 2;
  int a_off = static_cast<int>(std::llround(a_steps));
  domain_left_ = half - a_off;
  domain_right_ = half + a_off;
}

int Grid::nearest_index(double x) const {
  double t = (x + window_half_width_) / dx_;
  int j = static_cast<int>(std::llround(t));
  return std::clamp(j, 0, n_cells_);
}

int Grid::step_of(double h) const {
  double t = h / dx_;
  if (!is_integral(t, 1e-9))
    throw parameter_error("step length h = " + std::to_string(h) + " is not a node multiple (dx = " +
                          std::to_string(dx_) + ")");
  return static_cast<int>(std::llround(t));
}

bool Grid::same_as(const Grid& other) const {
  return window_half_width_ == other.window_half_width_ &&
         domain_half_width_ == other.domain_half_width_ && n_cells_ == other.n_cells_;
}

Grid build_grid(double window_half_width, double domain_half_width, int n_cells) {
  return Grid(window_half_width, domain_half_width, n_cells);
}

namespace {

// First node index with x_j strictly greater than bound (exact-node hits excluded).
int strict_above(const Grid& g, double bound) {
  double t = (bound + g.window_half_width()) / g.dx();
  if (is_integral(t)) return static_cast<int>(std::llround(t)) + 1;
  return static_cast<int>(std::ceil(t));
}

int strict_below(const Grid& g, double bound) {
  double t = (bound + g.window_half_width()) / g.dx();
  if (is_integral(t)) return static_cast<int>(std::llround(t)) - 1;
  return static_cast<int>(std::floor(t));
}

// Outward snapping for closed intervals: include exact-node endpoints.
int closed_lo(const Grid& g, double bound) {
  double t = (bound + g.window_half_width()) / g.dx();
  if (is_integral(t)) return static_cast<int>(std::llround(t));
  return static_cast<int>(std::floor(t));
}

int closed_hi(const Grid& g, double bound) {
  double t = (bound + g.window_half_width()) / g.dx();
  if (is_integral(t)) return static_cast<int>(std::llround(t));
  return static_cast<int>(std::ceil(t));
}

}  // namespace

Region inner_region(const Grid& grid, double lambda) {
  if (lambda < 0.0) throw parameter_error("inner_region: lambda must be >= 0");
  double a = grid.domain_half_width();
  if (lambda >= a) throw parameter_error("inner_region: lambda >= a yields an empty region");
  if (lambda == 0.0) return {RegionKind::interior, 0.0, grid.domain_left_index(), grid.domain_right_index()};
  int first = strict_above(grid, -a + lambda);
  int last = strict_below(grid, a - lambda);
  if (first > last) throw parameter_error("inner_region: no nodes inside Omega_lambda at this resolution");
  return {RegionKind::interior, lambda, first, last};
}

Region outer_region(const Grid& grid, double lambda) {
  if (lambda < 0.0) throw parameter_error("outer_region: lambda must be >= 0");
  double a = grid.domain_half_width();
  int first = std::max(0, closed_lo(grid, -a - lambda));
  int last = std::min(grid.n_cells(), closed_hi(grid, a + lambda));
  return {RegionKind::dilation, lambda, first, last};
}

Region interval_region(const Grid& grid, double lo, double hi) {
  if (!(lo <= hi)) throw parameter_error("interval_region: lo must be <= hi");
  int first = std::max(0, closed_lo(grid, lo));
  int last = std::min(grid.n_cells(), closed_hi(grid, hi));
  return {RegionKind::interval, 0.0, first, last};
}

Region window_region(const Grid& grid) { return {RegionKind::interval, 0.0, 0, grid.n_cells()}; }

DiscreteFunction::DiscreteFunction(const Grid& grid, std::vector<double> values,
                                   bool enforce_exterior_zero)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.n_nodes())
    throw parameter_error("DiscreteFunction: value count does not match node count");
  for (int j = 0; j < static_cast<int>(values_.size()); ++j) {
    if (!std::isfinite(values_[j]))
      throw parameter_error("DiscreteFunction: non-finite value at node " + std::to_string(j));
    if (grid_.exterior_node(j)) {
      if (enforce_exterior_zero) {
        values_[j] = 0.0;
      } else if (values_[j] != 0.0) {
        throw parameter_error("DiscreteFunction: nonzero exterior value at node " + std::to_string(j) +
                              " (x = " + std::to_string(grid_.node(j)) + ")");
      }
    }
  }
}

DiscreteFunction DiscreteFunction::zero(const Grid& grid) {
  return DiscreteFunction(grid, std::vector<double>(static_cast<size_t>(grid.n_nodes()), 0.0));
}

double DiscreteFunction::interpolate(double x) const {
  double L = grid_.window_half_width();
  if (x <= -L || x >= L) return 0.0;
  double t = (x + L) / grid_.dx();
  int j = static_cast<int>(std::floor(t));
  j = std::clamp(j, 0, grid_.n_cells() - 1);
  double w = t - j;
  return (1.0 - w) * values_[j] + w * values_[j + 1];
}

DiscreteFunction sample(const std::function<double(double)>& f, const Grid& grid,
                        bool enforce_exterior_zero) {
  std::vector<double> v(static_cast<size_t>(grid.n_nodes()));
  for (int j = 0; j < grid.n_nodes(); ++j) {
    double y = f(grid.node(j));
    if (!std::isfinite(y))
      throw parameter_error("sample: non-finite value at x = " + std::to_string(grid.node(j)));
    v[static_cast<size_t>(j)] = y;
  }
  return DiscreteFunction(grid, std::move(v), enforce_exterior_zero);
}

std::vector<double> sample_nodal(const std::function<double(double)>& f, const Grid& grid) {
  std::vector<double> v(static_cast<size_t>(grid.n_nodes()));
  for (int j = 0; j < grid.n_nodes(); ++j) {
    double y = f(grid.node(j));
    if (!std::isfinite(y))
      throw parameter_error("sample_nodal: non-finite value at x = " + std::to_string(grid.node(j)));
    v[static_cast<size_t>(j)] = y;
  }
  return v;
}

std::vector<double> shifted(std::span<const double> values, int steps) {
  int n = static_cast<int>(values.size());
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    int k = j + steps;
    if (k >= 0 && k < n) out[static_cast<size_t>(j)] = values[static_cast<size_t>(k)];
  }
  return out;
}

std::vector<double> trapezoid_weights(const Grid& grid, const Region& region) {
  int count = region.node_count();
  std::vector<double> w(static_cast<size_t>(std::max(count, 0)), grid.dx());
  if (count <= 1) {
    std::fill(w.begin(), w.end(), 0.0);
    return w;
  }
  w.front() = 0.5 * grid.dx();
  w.back() = 0.5 * grid.dx();
  return w;
}

double lp_norm(std::span<const double> values, double p, const Grid& grid, const Region& region) {
  if (!(p >= 1.0)) throw parameter_error("lp_norm: p must be >= 1");
  if (region.first < 0 || region.last >= static_cast<int>(values.size()))
    throw parameter_error("lp_norm: region not resolvable on these samples");
  int count = region.node_count();
  if (count <= 1) return 0.0;
  double dx = grid.dx();
  double acc = 0.0;
  for (int j = region.first; j <= region.last; ++j) {
    double w = (j == region.first || j == region.last) ? 0.5 * dx : dx;
    acc += w * std::pow(std::abs(values[static_cast<size_t>(j)]), p);
  }
  return std::pow(acc, 1.0 / p);
}

double lp_norm(const DiscreteFunction& v, double p, const Region& region) {
  return lp_norm(v.values(), p, v.grid(), region);
}

}  // namespace fraclap

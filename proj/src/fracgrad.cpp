#include "fraclap/fracgrad.hpp"

#include <cmath>

#include "fraclap/kernels.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

FracGradOperator::FracGradOperator(Grid grid, double s)
    : grid_(grid), s_(s), mu_(mu(1, s)) {}

namespace {

// I(m) = int_{-1}^{1} (1 - |w|) sgn(m - w) |m - w|^{-1-s} dw for m >= 1
// collapses to -d2(m^{1-s})/(s(1-s)); the midpoint offset m = 1/2 has the
// singular point inside the support and its own antiderivative form.
double unit_cell_integral(double m, double s) {
  if (m == 0.5) {
    double first = 2.0 * std::pow(0.5, 1.0 - s) / (1.0 - s);
    double second = (1.5 / s) * (std::pow(0.5, -s) - std::pow(1.5, -s)) -
                    (std::pow(1.5, 1.0 - s) - std::pow(0.5, 1.0 - s)) / (1.0 - s);
    return first + second;
  }
  double d2 = std::pow(m + 1.0, 1.0 - s) - 2.0 * std::pow(m, 1.0 - s) + std::pow(m - 1.0, 1.0 - s);
  return -d2 / (s * (1.0 - s));
}

}  // namespace

FracGradOperator FracGradOperator::assemble(const Grid& grid, double s) {
  if (!(s > 0.0 && s < 1.0)) throw parameter_error("assemble: order s must lie in (0,1)");
  if (grid.n_cells() < 8) throw parameter_error("assemble: grid too small (n_cells < 8)");

  FracGradOperator op(grid, s);
  int nn = grid.n_nodes();
  int nc = grid.n_cells();
  double scale = -op.mu_ * std::pow(grid.dx(), -s);

  op.gen_.assign(static_cast<size_t>(nn), 0.0);
  op.gen_mid_.assign(static_cast<size_t>(nn), 0.0);
  for (int m = 0; m < nn; ++m) {
    if (m > 0) op.gen_[static_cast<size_t>(m)] = scale * unit_cell_integral(m, s);
    op.gen_mid_[static_cast<size_t>(m)] = scale * unit_cell_integral(m + 0.5, s);
    if (!std::isfinite(op.gen_[static_cast<size_t>(m)]) ||
        !std::isfinite(op.gen_mid_[static_cast<size_t>(m)]))
      throw numeric_error("assemble: non-finite generator entry at offset " + std::to_string(m));
  }

  op.dense_.resize(static_cast<size_t>(nn) * nn);
  for (int k = 0; k < nn; ++k) {
    double* row = op.dense_.data() + static_cast<size_t>(k) * nn;
    for (int j = 0; j < nn; ++j) {
      int m = k - j;
      row[j] = (m == 0) ? 0.0 : (m > 0 ? op.gen_[static_cast<size_t>(m)] : -op.gen_[static_cast<size_t>(-m)]);
    }
  }

  op.dense_mid_.resize(static_cast<size_t>(nc) * nn);
  for (int k = 0; k < nc; ++k) {
    double* row = op.dense_mid_.data() + static_cast<size_t>(k) * nn;
    for (int j = 0; j < nn; ++j) {
      row[j] = (k >= j) ? op.gen_mid_[static_cast<size_t>(k - j)]
                        : -op.gen_mid_[static_cast<size_t>(j - k - 1)];
    }
  }
  op.dense_mid_t_.resize(static_cast<size_t>(nn) * nc);
  for (int j = 0; j < nn; ++j) {
    double* row = op.dense_mid_t_.data() + static_cast<size_t>(j) * nc;
    for (int k = 0; k < nc; ++k)
      row[k] = op.dense_mid_[static_cast<size_t>(k) * nn + j];
  }

  op.mass_ = trapezoid_weights(grid, window_region(grid));
  return op;
}

double FracGradOperator::midpoint_entry(int k, int j) const {
  return dense_mid_[static_cast<size_t>(k) * grid_.n_nodes() + j];
}

std::vector<double> FracGradOperator::apply_midpoint(std::span<const double> v) const {
  int nn = grid_.n_nodes();
  int nc = grid_.n_cells();
  if (static_cast<int>(v.size()) != nn) throw parameter_error("apply_midpoint: size mismatch");
  std::vector<double> out(static_cast<size_t>(nc));
  kernels::matvec(dense_mid_.data(), static_cast<size_t>(nn), static_cast<size_t>(nc),
                  static_cast<size_t>(nn), v.data(), out.data());
  return out;
}

void FracGradOperator::apply_midpoint_block(std::span<const double> x, int row_first, int row_count,
                                            int col_first, int col_count, double* y) const {
  int nn = grid_.n_nodes();
  kernels::matvec(dense_mid_.data() + static_cast<size_t>(row_first) * nn + col_first,
                  static_cast<size_t>(nn), static_cast<size_t>(row_count),
                  static_cast<size_t>(col_count), x.data(), y);
}

void FracGradOperator::apply_midpoint_transpose_block(std::span<const double> x, int row_first,
                                                      int row_count, int col_first, int col_count,
                                                      double* y) const {
  int nc = grid_.n_cells();
  kernels::matvec(dense_mid_t_.data() + static_cast<size_t>(row_first) * nc + col_first,
                  static_cast<size_t>(nc), static_cast<size_t>(row_count),
                  static_cast<size_t>(col_count), x.data(), y);
}

double FracGradOperator::generator(int offset) const {
  if (offset == 0) return 0.0;
  int m = offset > 0 ? offset : -offset;
  double g = gen_[static_cast<size_t>(m)];
  return offset > 0 ? g : -g;
}

std::vector<double> FracGradOperator::apply(const DiscreteFunction& v) const {
  if (!v.grid().same_as(grid_)) throw parameter_error("apply: grid mismatch");
  return apply_nodal(v.values());
}

std::vector<double> FracGradOperator::apply_nodal(std::span<const double> v) const {
  int nn = size();
  if (static_cast<int>(v.size()) != nn) throw parameter_error("apply_nodal: size mismatch");
  std::vector<double> out(static_cast<size_t>(nn));
  kernels::matvec(dense_.data(), static_cast<size_t>(nn), static_cast<size_t>(nn),
                  static_cast<size_t>(nn), v.data(), out.data());
  return out;
}

void FracGradOperator::apply_block(std::span<const double> x, int row_first, int row_count,
                                   int col_first, int col_count, double* y) const {
  int nn = size();
  kernels::matvec(dense_.data() + static_cast<size_t>(row_first) * nn + col_first,
                  static_cast<size_t>(nn), static_cast<size_t>(row_count),
                  static_cast<size_t>(col_count), x.data(), y);
}

std::vector<double> FracGradOperator::apply_divergence(std::span<const double> phi) const {
  int nn = size();
  if (static_cast<int>(phi.size()) != nn) throw parameter_error("apply_divergence: shape mismatch");
  // w = -M^{-1} G^T M phi; the assembled matrix is exactly antisymmetric, so
  // G^T = -G and w = M^{-1} G (M phi).
  std::vector<double> weighted(static_cast<size_t>(nn));
  kernels::mul(mass_.data(), phi.data(), weighted.data(), static_cast<size_t>(nn));
  std::vector<double> out = apply_nodal(weighted);
  for (int j = 0; j < nn; ++j) out[static_cast<size_t>(j)] /= mass_[static_cast<size_t>(j)];
  return out;
}

std::vector<double> apply_divergence_adaptive(const Grid& grid, double s,
                                              std::span<const double> phi, double tol) {
  if (!(s > 0.0 && s < 1.0)) throw parameter_error("apply_divergence_adaptive: s must lie in (0,1)");
  int nn = grid.n_nodes();
  if (static_cast<int>(phi.size()) != nn)
    throw parameter_error("apply_divergence_adaptive: shape mismatch");

  double dx = grid.dx();
  double L = grid.window_half_width();
  double normalization = mu(1, s);
  double cell_tol = tol * dx / (2.0 * L);

  auto pl = [&](double y) {
    double t = (y + L) / dx;
    int i = static_cast<int>(std::floor(t));
    if (i < 0 || i >= nn - 1) return 0.0;
    double w = t - i;
    return (1.0 - w) * phi[static_cast<size_t>(i)] + w * phi[static_cast<size_t>(i + 1)];
  };

  std::vector<double> out(static_cast<size_t>(nn), 0.0);
  for (int k = 0; k < nn; ++k) {
    double xk = grid.node(k);
    double fk = phi[static_cast<size_t>(k)];
    double acc = 0.0;

    // regular cells, adaptive Simpson on the defining integrand
    for (int i = 0; i + 1 <= grid.n_cells(); ++i) {
      if (i == k - 1 || i == k) continue;  // singular cells handled below
      double ya = grid.node(i), yb = grid.node(i + 1);
      auto f = [&](double y) {
        double d = xk - y;
        double ad = std::abs(d);
        return (fk - pl(y)) * (d > 0 ? 1.0 : -1.0) * std::pow(ad, -1.0 - s);
      };
      acc += integrate_adaptive(f, ya, yb, cell_tol);
    }

    // cells adjacent to x_k: within one cell the difference is exactly
    // -slope * t, so the integrand reduces to slope * |t|^{-s}
    double slope_sum = 0.0;
    if (k > 0) slope_sum += (fk - phi[static_cast<size_t>(k - 1)]) / dx;
    if (k < nn - 1) slope_sum += (phi[static_cast<size_t>(k + 1)] - fk) / dx;
    if (slope_sum != 0.0) {
      double sing =
          integrate_tanh_sinh([&](double t) { return std::pow(t, -s); }, 0.0, dx, cell_tol);
      acc += slope_sum * sing;
    }

    // analytic tails beyond the window, where the interpolant is identically 0
    if (fk != 0.0) {
      double dr = L - xk, dl = L + xk;
      if (dr <= 0.0 || dl <= 0.0)
        throw numeric_error("apply_divergence_adaptive: nonzero field value at the window edge");
      acc += fk * (std::pow(dl, -s) - std::pow(dr, -s)) / s;
    }

    out[static_cast<size_t>(k)] = normalization * acc;
  }
  return out;
}

DualityResult duality_defect(const Grid& grid, double s, const DiscreteFunction& phi,
                             std::span<const double> big_phi) {
  if (!phi.grid().same_as(grid)) throw parameter_error("duality_defect: grid mismatch");
  int nn = grid.n_nodes();
  if (static_cast<int>(big_phi.size()) != nn) throw parameter_error("duality_defect: shape mismatch");

  bool warn = false;
  for (int j : {0, 1, nn - 2, nn - 1}) {
    if (phi[j] != 0.0 || big_phi[static_cast<size_t>(j)] != 0.0) warn = true;
  }

  FracGradOperator op = FracGradOperator::assemble(grid, s);
  std::vector<double> grad_phi = op.apply(phi);
  std::vector<double> div_big = apply_divergence_adaptive(grid, s, big_phi);

  const std::vector<double>& w = op.window_weights();
  double lhs = 0.0, rhs = 0.0;
  for (int j = 0; j < nn; ++j) {
    lhs += w[static_cast<size_t>(j)] * phi[j] * div_big[static_cast<size_t>(j)];
    rhs += w[static_cast<size_t>(j)] * big_phi[static_cast<size_t>(j)] * grad_phi[static_cast<size_t>(j)];
  }
  Region win = window_region(grid);
  double norm_phi = lp_norm(phi.values(), 2.0, grid, win);
  double norm_big = lp_norm(big_phi, 2.0, grid, win);
  double defect = std::abs(lhs + rhs) / (norm_phi * norm_big + 1e-30);
  return {defect, warn};
}

double pointwise_bound_ratio(const FracGradOperator& op, const DiscreteFunction& phi,
                             double sup_norm, double lip_const) {
  if (lip_const == 0.0) return 0.0;  // constant profile: the bound is trivial
  if (!(sup_norm > 0.0)) throw parameter_error("pointwise_bound_ratio: sup norm must be positive");
  double s = op.order();
  std::vector<double> g = op.apply(phi);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  double denom = std::pow((1.0 - s) / s, 1.0 - s) * std::pow(sup_norm, 1.0 - s) * std::pow(lip_const, s);
  return gmax / denom;
}

}  // namespace fraclap

#include "fraclap/translate.hpp"

#include <algorithm>
#include <cmath>

namespace fraclap {

namespace {

// quintic smoothstep on [0,1]
double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

Cutoff::Cutoff(double center, double radius, const Grid& grid)
    : center_(center), radius_(radius), lip_(15.0 / (8.0 * radius)) {
  if (!(radius > 0.0)) throw parameter_error("Cutoff: radius must be positive");
  if (radius < 4.0 * grid.dx())
    throw parameter_error("Cutoff: radius below 4 dx cannot be resolved on this grid");
  samples_.resize(static_cast<size_t>(grid.n_nodes()));
  for (int j = 0; j < grid.n_nodes(); ++j) samples_[static_cast<size_t>(j)] = value(grid.node(j));
}

double Cutoff::value(double x) const {
  double d = std::abs(x - center_);
  if (d <= radius_) return 1.0;
  if (d >= 2.0 * radius_) return 0.0;
  return smoothstep5((2.0 * radius_ - d) / radius_);
}

Cutoff make_cutoff(double center, double radius, const Grid& grid) {
  return Cutoff(center, radius, grid);
}

bool DirectionSet::contains(int step) const {
  return std::binary_search(steps.begin(), steps.end(), step);
}

DirectionSet admissible_directions(const Grid& grid, double center, double radius) {
  if (radius < 4.0 * grid.dx())
    throw parameter_error("admissible_directions: radius below 4 dx cannot be resolved");
  double a = grid.domain_half_width();
  double dx = grid.dx();

  // nodes of the excluded set D_{2rho}(x0) \ Omega
  std::vector<double> excluded;
  for (int j = 0; j < grid.n_nodes(); ++j) {
    double x = grid.node(j);
    if (std::abs(x - center) <= 2.0 * radius && std::abs(x) >= a - 1e-12 * a) excluded.push_back(x);
  }

  DirectionSet set{center, radius, {}};
  int max_step = static_cast<int>(std::ceil(radius / dx));
  constexpr double kT[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int m = -max_step; m <= max_step; ++m) {
    double h = m * dx;
    if (std::abs(h) >= radius && m != 0) continue;
    bool ok = true;
    for (double x : excluded) {
      for (double t : kT) {
        if (std::abs(x + t * h) < a - 1e-12 * a) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) set.steps.push_back(m);
  }
  return set;
}

std::vector<double> localized_translate_nodal(const DiscreteFunction& v, double h,
                                              const Cutoff& phi) {
  const Grid& grid = v.grid();
  int m = grid.step_of(h);
  if (m == 0) return {v.values().begin(), v.values().end()};  // T_0 v = v exactly
  std::vector<double> out = shifted(v.values(), m);
  for (size_t j = 0; j < out.size(); ++j) {
    double c = phi.samples()[j];
    out[j] = c * out[j] + (1.0 - c) * v.values()[j];
  }
  return out;
}

DiscreteFunction localized_translate(const DiscreteFunction& v, double h, const Cutoff& phi) {
  const Grid& grid = v.grid();
  std::vector<double> out = localized_translate_nodal(v, h, phi);
  for (int j = 0; j < grid.n_nodes(); ++j) {
    if (grid.exterior_node(j) && out[static_cast<size_t>(j)] != 0.0)
      throw parameter_error("localized_translate: step h = " + std::to_string(h) +
                            " is not admissible at this cutoff (exterior trace violated at x = " +
                            std::to_string(grid.node(j)) + ")");
  }
  return DiscreteFunction(grid, std::move(out));
}

std::vector<double> commutator(const Cutoff& phi, const DiscreteFunction& v, double h,
                               const FracGradOperator& op) {
  const Grid& grid = op.grid();
  if (!v.grid().same_as(grid)) throw parameter_error("commutator: grid mismatch");
  int nn = grid.n_nodes();
  if (static_cast<int>(phi.samples().size()) != nn)
    throw parameter_error("commutator: cutoff sampled on a different grid");
  int m = grid.step_of(h);

  std::vector<double> g = shifted(v.values(), m);  // v_h
  for (int j = 0; j < nn; ++j) g[static_cast<size_t>(j)] -= v[j];

  // C_k = mu sum_j (phi_k - phi_j) g_j W_{kj}; W is the shared hat-cell
  // weight table, W_{kj} = -G_{kj}/mu, so mu W_{kj} = -G_{kj}.
  const std::vector<double>& dense = op.dense();
  std::vector<double> out(static_cast<size_t>(nn), 0.0);
  for (int k = 0; k < nn; ++k) {
    const double* row = dense.data() + static_cast<size_t>(k) * nn;
    double pk = phi.samples()[static_cast<size_t>(k)];
    double acc = 0.0;
    for (int j = 0; j < nn; ++j) {
      double gj = g[static_cast<size_t>(j)];
      if (gj == 0.0) continue;
      acc += (pk - phi.samples()[static_cast<size_t>(j)]) * gj * (-row[j]);
    }
    out[static_cast<size_t>(k)] = acc;  // mu already inside G entries: W = -G/mu => mu*W = -G
  }
  return out;
}

CommutatorBound commutator_bound_ratio(const Cutoff& phi, const DiscreteFunction& v, double h,
                                       const FracGradOperator& op, double p) {
  if (!(p >= 1.0)) throw parameter_error("commutator_bound_ratio: p must be >= 1");
  const Grid& grid = op.grid();
  int m = grid.step_of(h);
  std::vector<double> g = shifted(v.values(), m);
  int nn = grid.n_nodes();
  bool degenerate = true;
  for (int j = 0; j < nn; ++j) {
    g[static_cast<size_t>(j)] -= v[j];
    if (g[static_cast<size_t>(j)] != 0.0) degenerate = false;
  }
  if (degenerate) throw parameter_error("commutator_bound_ratio: v_h equals v (degenerate input)");

  std::vector<double> c = commutator(phi, v, h, op);
  Region win = window_region(grid);
  double num = lp_norm(c, p, grid, win);
  double den = lp_norm(g, p, grid, win);

  double s = op.order();
  constexpr double kSphereMeasure = 2.0;  // |S^0|
  double bound = op.normalization() * (kSphereMeasure / (1.0 - s) * phi.w1inf_norm() +
                                       2.0 * phi.sup_norm() * kSphereMeasure / s);
  return {num / den, bound};
}

}  // namespace fraclap

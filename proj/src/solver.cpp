#include "fraclap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fraclap/kernels.hpp"
#include "fraclap/translate.hpp"

namespace fraclap {

void ProblemSpec::validate() const {
  if (!(p > 1.0)) throw parameter_error("ProblemSpec: p must be > 1");
  if (!(s > 0.0 && s < 1.0)) throw parameter_error("ProblemSpec: s must lie in (0,1)");
  if (!rhs) throw parameter_error("ProblemSpec: right-hand side is required");
  if (diffusivity && !(diff_min > 0.0 && diff_min <= diff_max))
    throw parameter_error("ProblemSpec: diffusivity bounds need 0 < a_min <= a_max");
  (void)make_grid();
}

namespace {

// Assembled pieces shared by energy/gradient/solver.  The energy quadrature
// collocates grad^s at the cell midpoints.
struct Discrete {
  Grid grid;
  const FracGradOperator* op;
  std::vector<double> A;     // diffusivity at cell midpoints
  std::vector<double> Mf;    // trapezoid-weighted rhs, 0 outside Omega
  int dof_first, dof_count;  // strict interior of Omega
  double mf_norm;            // l2 of Mf over the dofs
};

Discrete discretize(const ProblemSpec& spec, const FracGradOperator& op) {
  spec.validate();
  Grid grid = spec.make_grid();
  if (!op.grid().same_as(grid)) throw parameter_error("operator assembled on a different grid");
  if (op.order() != spec.s) throw parameter_error("operator order does not match spec");

  Discrete d{grid, &op, {}, {}, 0, 0, 0.0};
  int nn = grid.n_nodes();
  int nc = grid.n_cells();
  d.A.assign(static_cast<size_t>(nc), 1.0);
  if (spec.diffusivity) {
    for (int k = 0; k < nc; ++k) {
      double v = spec.diffusivity(op.midpoint(k));
      if (!std::isfinite(v) || v < spec.diff_min - 1e-12 || v > spec.diff_max + 1e-12)
        throw parameter_error("diffusivity sample outside declared bounds at x = " +
                              std::to_string(op.midpoint(k)));
      d.A[static_cast<size_t>(k)] = v;
    }
  }

  Region omega = inner_region(grid, 0.0);
  std::vector<double> w = trapezoid_weights(grid, omega);
  d.Mf.assign(static_cast<size_t>(nn), 0.0);
  for (int j = omega.first; j <= omega.last; ++j) {
    double fx = spec.rhs(grid.node(j));
    if (!std::isfinite(fx))
      throw parameter_error("rhs sample non-finite at x = " + std::to_string(grid.node(j)));
    d.Mf[static_cast<size_t>(j)] = w[static_cast<size_t>(j - omega.first)] * fx;
  }

  d.dof_first = grid.domain_left_index() + 1;
  d.dof_count = grid.domain_right_index() - grid.domain_left_index() - 1;
  if (d.dof_count < 1) throw parameter_error("no interior degrees of freedom at this resolution");
  d.mf_norm = std::sqrt(kernels::sq_sum(d.Mf.data() + d.dof_first, static_cast<size_t>(d.dof_count)));
  return d;
}

// (A_k / p)(z_k^2 + eps^2)^{p/2} summed with uniform dx weights.
double gradient_term_of(const Discrete& d, std::span<const double> z, double p, double eps) {
  double dx = d.grid.dx();
  double acc = 0.0;
  double e2 = eps * eps;
  for (size_t k = 0; k < z.size(); ++k) {
    double t = z[k] * z[k] + e2;
    acc += d.A[k] * std::pow(t, 0.5 * p);
    if (!std::isfinite(acc))
      throw numeric_error("energy: non-finite intermediate at node " + std::to_string(k));
  }
  return dx * acc / p;
}

// psi_k = A_k (z_k^2 + eps^2)^{(p-2)/2} z_k.  For p < 2, eps = 0 and z = 0 the
// optimizer map is singular (strict mode raises); the residual map takes the
// continuous limit |z|^{p-2} z -> 0 instead.
void psi_of(const Discrete& d, std::span<const double> z, double p, double eps,
            std::vector<double>& out, bool strict_singularity = true) {
  out.resize(z.size());
  double e2 = eps * eps;
  if (p == 2.0 && eps == 0.0) {
    kernels::mul(d.A.data(), z.data(), out.data(), z.size());
    return;
  }
  for (size_t k = 0; k < z.size(); ++k) {
    double t = z[k] * z[k] + e2;
    if (t == 0.0) {
      if (p < 2.0 && strict_singularity)
        throw numeric_error("energy_gradient: |grad v| = 0 with p < 2 and eps = 0");
      out[k] = 0.0;
    } else {
      out[k] = d.A[k] * std::pow(t, 0.5 * (p - 2.0)) * z[k];
    }
  }
}

// gradient on the dof range: g = dx (Gm^T psi)|dofs - Mf|dofs
void gradient_of(const Discrete& d, std::span<const double> psi, std::vector<double>& g) {
  g.resize(static_cast<size_t>(d.dof_count));
  d.op->apply_midpoint_transpose_block(psi, d.dof_first, d.dof_count, 0, d.grid.n_cells(), g.data());
  double dx = d.grid.dx();
  for (int i = 0; i < d.dof_count; ++i)
    g[static_cast<size_t>(i)] = dx * g[static_cast<size_t>(i)] - d.Mf[static_cast<size_t>(d.dof_first + i)];
}

// in-place lower Cholesky factor of a dense SPD matrix
void chol_factor(std::vector<double>& M, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = M[static_cast<size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        sum -= M[static_cast<size_t>(i) * n + k] * M[static_cast<size_t>(j) * n + k];
      if (i == j) {
        if (!(sum > 0.0)) throw numeric_error("cholesky: matrix not positive definite");
        M[static_cast<size_t>(i) * n + j] = std::sqrt(sum);
      } else {
        M[static_cast<size_t>(i) * n + j] = sum / M[static_cast<size_t>(j) * n + j];
      }
    }
  }
}

void chol_solve(const std::vector<double>& L, int n, std::vector<double>& x) {
  for (int i = 0; i < n; ++i) {
    double sum = x[static_cast<size_t>(i)];
    for (int k = 0; k < i; ++k) sum -= L[static_cast<size_t>(i) * n + k] * x[static_cast<size_t>(k)];
    x[static_cast<size_t>(i)] = sum / L[static_cast<size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = x[static_cast<size_t>(i)];
    for (int k = i + 1; k < n; ++k) sum -= L[static_cast<size_t>(k) * n + i] * x[static_cast<size_t>(k)];
    x[static_cast<size_t>(i)] = sum / L[static_cast<size_t>(i) * n + i];
  }
}

// Fixed descent metric P = dx G^T diag(A) G on the dofs (the p = 2 Hessian).
// The condition number of the raw Hessian grows like dx^{-2s}, which stalls
// plain monotone BB on fine grids; BB steps taken in the P metric keep the
// iteration monotone and deterministic while restoring fast convergence.
struct Metric {
  int ni = 0;
  std::vector<double> factor;

  std::vector<double> apply_inverse(std::span<const double> g) const {
    std::vector<double> x(g.begin(), g.end());
    chol_solve(factor, ni, x);
    return x;
  }
};

Metric build_metric(const Discrete& d, std::span<const double> weights) {
  int nc = d.grid.n_cells();
  int ni = d.dof_count;
  double dx = d.grid.dx();
  // rows of C = sqrt(weight) dof columns of Gm
  std::vector<double> C(static_cast<size_t>(ni) * nc);
  for (int i = 0; i < ni; ++i) {
    int col = d.dof_first + i;
    for (int k = 0; k < nc; ++k)
      C[static_cast<size_t>(i) * nc + k] =
          std::sqrt(weights[static_cast<size_t>(k)]) * d.op->midpoint_entry(k, col);
  }
  Metric m;
  m.ni = ni;
  m.factor.resize(static_cast<size_t>(ni) * ni);
  for (int i = 0; i < ni; ++i) {
    for (int j = i; j < ni; ++j) {
      double v = dx * kernels::dot(C.data() + static_cast<size_t>(i) * nc,
                                   C.data() + static_cast<size_t>(j) * nc, static_cast<size_t>(nc));
      m.factor[static_cast<size_t>(i) * ni + j] = v;
      m.factor[static_cast<size_t>(j) * ni + i] = v;
    }
  }
  chol_factor(m.factor, ni);
  return m;
}

// Curvature weights of the regularized objective at the current iterate,
// floored away from 0 so the metric stays SPD even where |Gv| vanishes.
std::vector<double> hessian_weights(const Discrete& d, std::span<const double> z, double p,
                                    double eps) {
  int nc = d.grid.n_cells();
  std::vector<double> w(static_cast<size_t>(nc));
  if (p == 2.0) {
    for (int k = 0; k < nc; ++k) w[static_cast<size_t>(k)] = d.A[static_cast<size_t>(k)];
    return w;
  }
  double zmax = 0.0;
  for (int k = 0; k < nc; ++k) zmax = std::max(zmax, std::abs(z[static_cast<size_t>(k)]));
  double floor = std::max(eps, 1e-4 * zmax);
  if (floor == 0.0) {
    // zero start with eps = 0: fall back to the p = 2 metric
    for (int k = 0; k < nc; ++k) w[static_cast<size_t>(k)] = d.A[static_cast<size_t>(k)];
    return w;
  }
  double f2 = floor * floor;
  for (int k = 0; k < nc; ++k) {
    double zk = z[static_cast<size_t>(k)];
    double t = zk * zk + f2;
    w[static_cast<size_t>(k)] =
        d.A[static_cast<size_t>(k)] * std::pow(t, 0.5 * (p - 4.0)) * (t + (p - 2.0) * zk * zk);
  }
  return w;
}

struct StageResult {
  int iterations;
};

// Monotone BB descent on the eps-regularized objective over the dof range;
// steps are taken in an SPD metric built from the curvature weights at the
// stage start and refreshed when progress stalls.  u (dofs) and z = Gm u (cell
// midpoints) are updated in place.
StageResult bb_descent(const Discrete& d, double p, double eps, double tol, int iter_budget,
                       int iters_done, int max_total, std::vector<double>& u,
                       std::vector<double>& z, std::vector<double>& grad_history,
                       std::vector<double>& energy_history) {
  int nc = d.grid.n_cells();
  double dx = d.grid.dx();
  std::vector<double> psi, g, g_prev, w(static_cast<size_t>(nc));

  auto objective = [&](std::span<const double> zz, std::span<const double> uu) {
    double lin = kernels::dot(d.Mf.data() + d.dof_first, uu.data(), uu.size());
    return gradient_term_of(d, zz, p, eps) - lin;
  };

  psi_of(d, z, p, eps, psi);
  gradient_of(d, psi, g);
  double gnorm = std::sqrt(kernels::sq_sum(g.data(), g.size()));
  double fcur = objective(z, u);
  double alpha = 0.0;
  int it = 0;
  std::vector<double> z_trial(static_cast<size_t>(nc)), u_trial(u.size());
  std::vector<double> dir;

  Metric metric = build_metric(d, hessian_weights(d, z, p, eps));
  bool fresh_metric = true;
  int window_start = 0;
  double gnorm_at_window = gnorm;

  while (gnorm > tol * d.mf_norm) {
    if (iters_done + it >= max_total)
      throw convergence_error("solve_dirichlet: iteration budget exhausted (" +
                              std::to_string(max_total) + " iterations, |g| = " +
                              std::to_string(gnorm) + ", eps = " + std::to_string(eps) + ")");
    if (it >= iter_budget) break;

    if (p != 2.0 && it - window_start >= 50) {
      if (gnorm > 0.1 * gnorm_at_window) {
        // the last window made little progress: rebuild the metric here
        metric = build_metric(d, hessian_weights(d, z, p, eps));
        fresh_metric = true;
      }
      window_start = it;
      gnorm_at_window = gnorm;
    }

    // descent direction d = -P^{-1} g; slope along it is -g^T P^{-1} g
    dir = metric.apply_inverse(g);
    double slope = kernels::dot(g.data(), dir.data(), dir.size());  // g^T P^{-1} g > 0
    for (double& v : dir) v = -v;
    d.op->apply_midpoint_block(dir, 0, nc, d.dof_first, d.dof_count, w.data());

    if (fresh_metric) {
      // exact curvature along the direction: alpha = slope / (d^T Hess d)
      double curv = 0.0;
      double e2 = eps * eps;
      for (int k = 0; k < nc; ++k) {
        double zk = z[static_cast<size_t>(k)];
        double t = zk * zk + e2;
        double dpsi;
        if (p == 2.0) {
          dpsi = d.A[static_cast<size_t>(k)];
        } else if (t == 0.0) {
          dpsi = 0.0;
        } else {
          dpsi = d.A[static_cast<size_t>(k)] * std::pow(t, 0.5 * (p - 4.0)) * (t + (p - 2.0) * zk * zk);
        }
        curv += dpsi * w[static_cast<size_t>(k)] * w[static_cast<size_t>(k)];
      }
      curv *= dx;
      alpha = (curv > 0.0) ? slope / curv : 1.0;
      fresh_metric = false;
    }
    alpha = std::clamp(alpha, 1e-14, 1e14);

    // Armijo backtracking along dir; the absolute allowance keeps the test
    // meaningful once energy differences reach rounding noise
    double beta = alpha;
    constexpr double kArmijo = 1e-4;
    double noise = 32.0 * std::numeric_limits<double>::epsilon() * (std::abs(fcur) + 1.0);
    double ftrial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 64; ++bt) {
      for (size_t i = 0; i < u.size(); ++i) u_trial[i] = u[i] + beta * dir[i];
      for (int k = 0; k < nc; ++k)
        z_trial[static_cast<size_t>(k)] = z[static_cast<size_t>(k)] + beta * w[static_cast<size_t>(k)];
      ftrial = objective(z_trial, u_trial);
      if (ftrial <= fcur - kArmijo * beta * slope + noise) {
        accepted = true;
        break;
      }
      beta *= 0.5;
    }
    if (!accepted)
      throw convergence_error("solve_dirichlet: line search failed at iteration " +
                              std::to_string(iters_done + it));

    g_prev = g;
    u.swap(u_trial);
    z.swap(z_trial);
    fcur = ftrial;
    ++it;

    psi_of(d, z, p, eps, psi);
    gradient_of(d, psi, g);
    gnorm = std::sqrt(kernels::sq_sum(g.data(), g.size()));
    grad_history.push_back(gnorm);
    energy_history.push_back(fcur);

    // BB1 in the P metric: s = beta dir, s^T P s = beta^2 slope,
    // s^T y = beta dir^T (g - g_prev)
    double dty = 0.0;
    for (size_t i = 0; i < dir.size(); ++i) dty += dir[i] * (g[i] - g_prev[i]);
    alpha = (dty > 0.0) ? beta * slope / dty : 2.0 * beta;
  }
  return {it};
}

}  // namespace

double energy_gradient_term(const DiscreteFunction& v, const ProblemSpec& spec,
                            const FracGradOperator& op, double eps) {
  Discrete d = discretize(spec, op);
  std::vector<double> z = op.apply_midpoint(v.values());
  return gradient_term_of(d, z, spec.p, eps);
}

double energy_linear_term(const DiscreteFunction& v, const ProblemSpec& spec,
                          const FracGradOperator& op) {
  Discrete d = discretize(spec, op);
  double lin = 0.0;
  for (int j = 0; j < d.grid.n_nodes(); ++j) lin += d.Mf[static_cast<size_t>(j)] * v[j];
  return lin;
}

double energy(const DiscreteFunction& v, const ProblemSpec& spec, const FracGradOperator& op,
              double eps) {
  Discrete d = discretize(spec, op);
  std::vector<double> z = op.apply_midpoint(v.values());
  double lin = 0.0;
  for (int j = 0; j < d.grid.n_nodes(); ++j) lin += d.Mf[static_cast<size_t>(j)] * v[j];
  return gradient_term_of(d, z, spec.p, eps) - lin;
}

std::vector<double> energy_gradient(const DiscreteFunction& v, const ProblemSpec& spec,
                                    const FracGradOperator& op, double eps) {
  Discrete d = discretize(spec, op);
  std::vector<double> z = op.apply_midpoint(v.values());
  std::vector<double> psi;
  psi_of(d, z, spec.p, eps, psi);
  std::vector<double> g_dofs;
  gradient_of(d, psi, g_dofs);
  std::vector<double> out(static_cast<size_t>(d.grid.n_nodes()), 0.0);
  for (int i = 0; i < d.dof_count; ++i) out[static_cast<size_t>(d.dof_first + i)] = g_dofs[static_cast<size_t>(i)];
  return out;
}

Solution solve_dirichlet(const ProblemSpec& spec) {
  FracGradOperator op = FracGradOperator::assemble(spec.make_grid(), spec.s);
  return solve_dirichlet(spec, op);
}

Solution solve_dirichlet(const ProblemSpec& spec, const FracGradOperator& op) {
  Discrete d = discretize(spec, op);
  int nn = d.grid.n_nodes();

  Solution sol{DiscreteFunction::zero(d.grid), 0.0, 0.0, {}, {}, 0, {}};
  if (d.mf_norm == 0.0) return sol;  // f == 0: u == 0 is the unique minimizer

  std::vector<double> u(static_cast<size_t>(d.dof_count), 0.0);
  std::vector<double> z(static_cast<size_t>(d.grid.n_cells()), 0.0);

  const SolverParams& prm = spec.solver;
  int total = 0;
  if (spec.p >= 2.0) {
    StageResult r = bb_descent(d, spec.p, 0.0, prm.tol_grad, prm.max_iterations, 0,
                               prm.max_iterations, u, z, sol.gradient_norm_history,
                               sol.energy_history);
    total = r.iterations;
  } else {
    std::vector<double> schedule = prm.eps_schedule;
    if (schedule.empty()) throw parameter_error("solve_dirichlet: empty eps schedule for p < 2");
    std::sort(schedule.begin(), schedule.end(), std::greater<double>());
    for (size_t stage = 0; stage < schedule.size(); ++stage) {
      bool last = stage + 1 == schedule.size();
      double tol = last ? prm.tol_grad_degenerate : std::max(prm.tol_grad_degenerate, 1e-4);
      StageResult r = bb_descent(d, spec.p, schedule[stage], tol, prm.max_iterations - total, total,
                                 prm.max_iterations, u, z, sol.gradient_norm_history,
                                 sol.energy_history);
      total += r.iterations;
      sol.eps_schedule_used.push_back(schedule[stage]);
    }
  }

  std::vector<double> full(static_cast<size_t>(nn), 0.0);
  for (int i = 0; i < d.dof_count; ++i) full[static_cast<size_t>(d.dof_first + i)] = u[static_cast<size_t>(i)];
  sol.u = DiscreteFunction(d.grid, std::move(full));
  sol.iterations = total;

  double lin = kernels::dot(d.Mf.data() + d.dof_first, u.data(), u.size());
  sol.energy = gradient_term_of(d, z, spec.p, 0.0) - lin;
  sol.weak_residual = weak_residual(sol.u, spec, op);
  return sol;
}

double weak_residual(const DiscreteFunction& u, const ProblemSpec& spec,
                     const FracGradOperator& op) {
  Discrete d = discretize(spec, op);
  std::vector<double> z = op.apply_midpoint(u.values());
  std::vector<double> psi;
  psi_of(d, z, spec.p, 0.0, psi, /*strict_singularity=*/false);
  std::vector<double> r;
  gradient_of(d, psi, r);
  double rnorm = std::sqrt(kernels::sq_sum(r.data(), r.size()));
  if (d.mf_norm == 0.0) {
    bool zero = true;
    for (double v : u.values())
      if (v != 0.0) zero = false;
    if (!zero) throw parameter_error("weak_residual: |Mf| = 0 with u != 0 (degenerate normalization)");
    return 0.0;
  }
  return rnorm / d.mf_norm;
}

DiscreteFunction dense_solve_p2(const ProblemSpec& spec, const FracGradOperator& op) {
  if (spec.p != 2.0) throw parameter_error("dense_solve_p2: requires p = 2");
  Discrete d = discretize(spec, op);
  int nn = d.grid.n_nodes();
  int nc = d.grid.n_cells();
  int ni = d.dof_count;
  double dx = d.grid.dx();

  // columns of Gm over the dofs, stored as rows of C (ni x nc) scaled by sqrt(A)
  std::vector<double> C(static_cast<size_t>(ni) * nc);
  for (int i = 0; i < ni; ++i) {
    int col = d.dof_first + i;
    for (int k = 0; k < nc; ++k) {
      double scale = std::sqrt(d.A[static_cast<size_t>(k)]);
      C[static_cast<size_t>(i) * nc + k] = scale * op.midpoint_entry(k, col);
    }
  }
  // H = dx C C^T  (SPD); b = Mf on the dofs
  std::vector<double> H(static_cast<size_t>(ni) * ni);
  for (int i = 0; i < ni; ++i) {
    for (int j = i; j < ni; ++j) {
      double v = dx * kernels::dot(C.data() + static_cast<size_t>(i) * nc,
                                   C.data() + static_cast<size_t>(j) * nc, static_cast<size_t>(nc));
      H[static_cast<size_t>(i) * ni + j] = v;
      H[static_cast<size_t>(j) * ni + i] = v;
    }
  }
  chol_factor(H, ni);
  std::vector<double> x(static_cast<size_t>(ni));
  for (int i = 0; i < ni; ++i) x[static_cast<size_t>(i)] = d.Mf[static_cast<size_t>(d.dof_first + i)];
  chol_solve(H, ni, x);

  std::vector<double> full(static_cast<size_t>(nn), 0.0);
  for (int i = 0; i < ni; ++i) full[static_cast<size_t>(d.dof_first + i)] = x[static_cast<size_t>(i)];
  return DiscreteFunction(d.grid, std::move(full));
}

StabilityReport stability_check(const ProblemSpec& spec, const std::vector<double>& lambdas) {
  FracGradOperator op = FracGradOperator::assemble(spec.make_grid(), spec.s);
  Solution base = solve_dirichlet(spec, op);
  Region win = window_region(base.u.grid());
  std::vector<double> gz = op.apply(base.u);
  double base_norm = lp_norm(gz, spec.p, base.u.grid(), win);

  StabilityReport report{{}, true};
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw parameter_error("stability_check: lambda must be positive");
    ProblemSpec scaled = spec;
    auto f = spec.rhs;
    scaled.rhs = [f, lam](double x) { return lam * f(x); };
    Solution sol = solve_dirichlet(scaled, op);
    std::vector<double> gzl = op.apply(sol.u);
    double norm = lp_norm(gzl, spec.p, sol.u.grid(), win);
    double ratio = norm / base_norm;
    double expected = std::pow(lam, 1.0 / (spec.p - 1.0));
    bool pass = std::abs(ratio / expected - 1.0) <= 1e-3;
    report.rows.push_back({lam, norm, ratio, expected, pass});
    report.pass = report.pass && pass;
  }
  return report;
}

double regularity_modulus(const DiscreteFunction& v, const ProblemSpec& spec,
                          const FracGradOperator& op, double x0, double rho, double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw parameter_error("regularity_modulus: sigma must lie in (0,1]");
  const Grid& grid = op.grid();
  DirectionSet dirs = admissible_directions(grid, x0, rho);
  bool nontrivial = false;
  for (int m : dirs.steps)
    if (m != 0) nontrivial = true;
  if (!nontrivial)
    throw parameter_error("regularity_modulus: no admissible directions beyond h = 0 at x0 = " +
                          std::to_string(x0));
  Cutoff phi = make_cutoff(x0, rho, grid);
  double j0 = energy(v, spec, op);
  double omega = 0.0;
  for (int m : dirs.steps) {
    if (m == 0) continue;
    double h = m * grid.dx();
    DiscreteFunction tv = localized_translate(v, h, phi);
    double jh = energy(tv, spec, op);
    omega = std::max(omega, std::abs(jh - j0) / std::pow(std::abs(h), sigma));
  }
  return omega;
}

}  // namespace fraclap

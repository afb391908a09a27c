#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fraclap/fracgrad.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

struct SolverParams {
  double tol_grad = 1e-8;             // stopping tolerance, p >= 2
  double tol_grad_degenerate = 1e-6;  // stopping tolerance at the final eps, 1 < p < 2
  int max_iterations = 50000;         // total across continuation stages
  std::vector<double> eps_schedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
};

/// Dirichlet problem instance: -div_s(A |grad^s u|^{p-2} grad^s u) = f in
/// Omega = (-a, a), u = 0 outside, discretized on the window [-L, L].
struct ProblemSpec {
  double p = 2.0;
  double s = 0.5;
  std::function<double(double)> rhs;
  std::function<double(double)> diffusivity;  // empty: A == 1
  double diff_min = 0.0;                      // declared bounds when diffusivity is set
  double diff_max = 0.0;
  double window_half_width = 8.0;
  double domain_half_width = 1.0;
  int n_cells = 2048;
  SolverParams solver;

  Grid make_grid() const { return Grid(window_half_width, domain_half_width, n_cells); }
  void validate() const;
};

struct Solution {
  DiscreteFunction u;
  double energy;         // unregularized J(u)
  double weak_residual;  // relative weak-form defect at exit
  std::vector<double> gradient_norm_history;
  std::vector<double> energy_history;  // stage objective at accepted steps
  int iterations;
  std::vector<double> eps_schedule_used;
};

/// J_eps(v) = dx sum_k (A_k / p)(|Gv|_k^2 + eps^2)^{p/2} - <f, v>_Omega.
/// eps = 0 gives the energy functional itself.
double energy(const DiscreteFunction& v, const ProblemSpec& spec, const FracGradOperator& op,
              double eps = 0.0);

/// The gradient-power and linear pieces of the energy, separately.
double energy_gradient_term(const DiscreteFunction& v, const ProblemSpec& spec,
                            const FracGradOperator& op, double eps = 0.0);
double energy_linear_term(const DiscreteFunction& v, const ProblemSpec& spec,
                          const FracGradOperator& op);

/// dx G^T [A (|Gv|^2 + eps^2)^{(p-2)/2} Gv] - M f, projected to 0 on exterior
/// nodes.  eps = 0 requires p >= 2 or |Gv| bounded away from 0.
std::vector<double> energy_gradient(const DiscreteFunction& v, const ProblemSpec& spec,
                                    const FracGradOperator& op, double eps = 0.0);

/// Energy minimization by Barzilai-Borwein steps with an Armijo backtracking
/// safeguard; 1 < p < 2 runs warm-started eps-continuation.  Deterministic
/// (zero initial guess).
Solution solve_dirichlet(const ProblemSpec& spec);
Solution solve_dirichlet(const ProblemSpec& spec, const FracGradOperator& op);

/// |dx G^T[A |Gu|^{p-2} Gu] - Mf|_2 / |Mf|_2 over the interior nodes.
double weak_residual(const DiscreteFunction& u, const ProblemSpec& spec,
                     const FracGradOperator& op);

/// Exact discrete minimizer for p = 2 by a dense symmetric factorization of
/// dx G^T G on the interior nodes; the solver's independent oracle.
DiscreteFunction dense_solve_p2(const ProblemSpec& spec, const FracGradOperator& op);

struct StabilityRow {
  double lambda;
  double grad_norm;   // |grad^s u_lambda|_{L^p}
  double ratio;       // grad_norm / grad_norm(lambda = 1)
  double expected;    // lambda^{1/(p-1)}
  bool pass;          // |ratio/expected - 1| <= 1e-3
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool pass;
};

/// Scales the right-hand side by each lambda and checks the homogeneity
/// refinement of the stability estimate.
StabilityReport stability_check(const ProblemSpec& spec, const std::vector<double>& lambdas);

/// omega(v) = max over admissible h != 0 of |J(T_h v) - J(v)| / |h|^sigma.
double regularity_modulus(const DiscreteFunction& v, const ProblemSpec& spec,
                          const FracGradOperator& op, double x0, double rho, double sigma);

}  // namespace fraclap

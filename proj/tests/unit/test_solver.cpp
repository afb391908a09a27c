#include <cmath>
#include <vector>

#include <doctest.h>

#include "fraclap/solver.hpp"
#include "fraclap/translate.hpp"

using namespace fraclap;

namespace {

struct Rng {
  uint64_t state = 0xc0ffee123456789ull;
  double next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return (state >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
  }
};

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double plateau_bump(double x, double center, double r) {
  double d = std::abs(x - center);
  if (d <= r) return 1.0;
  if (d >= 2.0 * r) return 0.0;
  return smoothstep5((2.0 * r - d) / r);
}

ProblemSpec base_spec(double p, double s, int n, double L) {
  ProblemSpec spec;
  spec.p = p;
  spec.s = s;
  spec.rhs = [](double) { return 1.0; };
  spec.window_half_width = L;
  spec.domain_half_width = 1.0;
  spec.n_cells = n;
  return spec;
}

DiscreteFunction random_interior(const Grid& g, Rng& rng, double scale = 1.0) {
  std::vector<double> v(static_cast<size_t>(g.n_nodes()), 0.0);
  for (int j = g.domain_left_index() + 1; j < g.domain_right_index(); ++j)
    v[static_cast<size_t>(j)] = scale * rng.next();
  return DiscreteFunction(g, v);
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("energy basics") {
    ProblemSpec spec = base_spec(2.0, 0.5, 128, 4.0);
    Grid g = spec.make_grid();
    FracGradOperator op = FracGradOperator::assemble(g, spec.s);

    CHECK(energy(DiscreteFunction::zero(g), spec, op) == 0.0);

    ProblemSpec nof = spec;
    nof.rhs = [](double) { return 0.0; };
    Rng rng;
    DiscreteFunction v = random_interior(g, rng);
    CHECK(energy(v, nof, op) > 0.0);
    CHECK(energy(v, spec, op) ==
          doctest::Approx(energy_gradient_term(v, spec, op) - energy_linear_term(v, spec, op))
              .epsilon(1e-14));
  }

  TEST_CASE("midpoint convexity of the gradient term") {
    ProblemSpec spec = base_spec(3.0, 0.4, 96, 4.0);
    Grid g = spec.make_grid();
    FracGradOperator op = FracGradOperator::assemble(g, spec.s);
    Rng rng;
    for (int trial = 0; trial < 8; ++trial) {
      DiscreteFunction u = random_interior(g, rng);
      DiscreteFunction v = random_interior(g, rng);
      std::vector<double> mid(u.values().begin(), u.values().end());
      for (int j = 0; j < g.n_nodes(); ++j) mid[static_cast<size_t>(j)] = 0.5 * (u[j] + v[j]);
      double lhs = energy_gradient_term(DiscreteFunction(g, mid), spec, op);
      double rhs = 0.5 * (energy_gradient_term(u, spec, op) + energy_gradient_term(v, spec, op));
      CHECK(lhs <= rhs + 1e-12);
    }
  }

  TEST_CASE("gradient at zero with regularization is exactly -Mf") {
    ProblemSpec spec = base_spec(1.5, 0.5, 128, 4.0);
    Grid g = spec.make_grid();
    FracGradOperator op = FracGradOperator::assemble(g, spec.s);
    std::vector<double> grad = energy_gradient(DiscreteFunction::zero(g), spec, op, 1e-2);

    Region omega = inner_region(g, 0.0);
    std::vector<double> w = trapezoid_weights(g, omega);
    for (int j = 0; j < g.n_nodes(); ++j) {
      if (j > g.domain_left_index() && j < g.domain_right_index()) {
        CHECK(grad[static_cast<size_t>(j)] == -w[static_cast<size_t>(j - omega.first)]);
      } else {
        CHECK(grad[static_cast<size_t>(j)] == 0.0);  // exterior projection
      }
    }
  }

  TEST_CASE("p = 2 gradient is affine in v") {
    ProblemSpec spec = base_spec(2.0, 0.5, 96, 4.0);
    Grid g = spec.make_grid();
    FracGradOperator op = FracGradOperator::assemble(g, spec.s);
    Rng rng;
    DiscreteFunction v = random_interior(g, rng);
    std::vector<double> v2(v.values().begin(), v.values().end());
    for (double& x : v2) x *= 2.0;
    std::vector<double> g1 = energy_gradient(v, spec, op);
    std::vector<double> g2 = energy_gradient(DiscreteFunction(g, v2), spec, op);
    std::vector<double> mf = energy_gradient(DiscreteFunction::zero(g), spec, op);  // = -Mf
    double defect = 0.0, scale = 0.0;
    for (size_t j = 0; j < g1.size(); ++j) {
      defect = std::max(defect, std::abs((g2[j] - mf[j]) - 2.0 * (g1[j] - mf[j])));
      scale = std::max(scale, std::abs(g1[j] - mf[j]));
    }
    CHECK(defect / scale <= 1e-12);
  }

  TEST_CASE("analytic gradient matches central finite differences") {
    Grid g = build_grid(4.0, 1.0, 128);
    DiscreteFunction v = sample([](double x) { return std::cos(1.3 * x) * plateau_bump(x, 0.0, 0.45); }, g, true);
    DiscreteFunction dir = sample([](double x) { return std::sin(2.1 * x + 0.3) * plateau_bump(x, 0.05, 0.4); }, g, true);

    for (auto [p, eps] : {std::pair{2.0, 0.0}, std::pair{3.0, 0.0}, std::pair{1.5, 1e-3}}) {
      ProblemSpec spec = base_spec(p, 0.5, 128, 4.0);
      FracGradOperator op = FracGradOperator::assemble(g, spec.s);
      std::vector<double> grad = energy_gradient(v, spec, op, eps);
      double directional = 0.0;
      for (int j = 0; j < g.n_nodes(); ++j) directional += grad[static_cast<size_t>(j)] * dir[j];

      double step = 1e-6;
      std::vector<double> vp(v.values().begin(), v.values().end()), vm(vp);
      for (int j = 0; j < g.n_nodes(); ++j) {
        vp[static_cast<size_t>(j)] += step * dir[j];
        vm[static_cast<size_t>(j)] -= step * dir[j];
      }
      double fd = (energy(DiscreteFunction(g, vp, true), spec, op, eps) -
                   energy(DiscreteFunction(g, vm, true), spec, op, eps)) /
                  (2.0 * step);
      CHECK(std::abs(fd - directional) / std::abs(directional) <= 1e-6);
    }
  }

  TEST_CASE("singularity guard for degenerate p") {
    ProblemSpec spec = base_spec(1.5, 0.5, 64, 4.0);
    Grid g = spec.make_grid();
    FracGradOperator op = FracGradOperator::assemble(g, spec.s);
    CHECK_THROWS_AS(energy_gradient(DiscreteFunction::zero(g), spec, op, 0.0), numeric_error);
  }

  TEST_CASE("zero right-hand side returns the zero minimizer immediately") {
    ProblemSpec spec = base_spec(2.0, 0.5, 256, 8.0);
    spec.rhs = [](double) { return 0.0; };
    Solution sol = solve_dirichlet(spec);
    CHECK(sol.iterations == 0);
    for (double v : sol.u.values()) CHECK(v == 0.0);
    CHECK(sol.energy == 0.0);
  }

  TEST_CASE("parameter validation") {
    ProblemSpec bad = base_spec(0.9, 0.5, 64, 4.0);
    CHECK_THROWS_AS(solve_dirichlet(bad), parameter_error);
    ProblemSpec bad_s = base_spec(2.0, 1.2, 64, 4.0);
    CHECK_THROWS_AS(solve_dirichlet(bad_s), parameter_error);

    ProblemSpec out_of_bounds = base_spec(2.0, 0.5, 64, 4.0);
    out_of_bounds.diffusivity = [](double x) { return 1.0 + x; };  // hits negatives on [-4,4]
    out_of_bounds.diff_min = 0.9;
    out_of_bounds.diff_max = 1.1;
    CHECK_THROWS_AS(solve_dirichlet(out_of_bounds), parameter_error);
  }

  TEST_CASE("iteration budget exhaustion raises a convergence error") {
    ProblemSpec spec = base_spec(3.0, 0.5, 256, 8.0);
    spec.solver.max_iterations = 2;
    spec.solver.tol_grad = 1e-12;
    CHECK_THROWS_AS(solve_dirichlet(spec), convergence_error);
  }

  TEST_CASE("BB minimizer agrees with the dense p = 2 solve") {
    ProblemSpec spec = base_spec(2.0, 0.5, 256, 8.0);
    spec.solver.tol_grad = 1e-12;
    FracGradOperator op = FracGradOperator::assemble(spec.make_grid(), spec.s);
    Solution sol = solve_dirichlet(spec, op);
    DiscreteFunction exact = dense_solve_p2(spec, op);
    double diff = 0.0, scale = 0.0;
    for (int j = 0; j < sol.u.size(); ++j) {
      diff = std::max(diff, std::abs(sol.u[j] - exact[j]));
      scale = std::max(scale, std::abs(exact[j]));
    }
    CHECK(diff / scale <= 1e-8);
    CHECK(weak_residual(exact, spec, op) <= 1e-10);
    CHECK(sol.weak_residual <= 1e-12);
  }

  TEST_CASE("energy history is non-increasing across accepted steps") {
    ProblemSpec spec = base_spec(3.0, 0.6, 256, 8.0);
    Solution sol = solve_dirichlet(spec);
    for (size_t i = 1; i < sol.energy_history.size(); ++i)
      CHECK(sol.energy_history[i] <= sol.energy_history[i - 1] + 1e-15);
    CHECK(sol.weak_residual <= spec.solver.tol_grad);
  }

  TEST_CASE("closed-form reproduction at moderate resolution") {
    ProblemSpec spec = base_spec(2.0, 0.5, 512, 8.0);
    Solution sol = solve_dirichlet(spec);
    CHECK(sol.u.interpolate(0.0) == doctest::Approx(1.0).epsilon(0.04));
  }

  TEST_CASE("window doubling moves the energy by less than half a percent") {
    // the only truncation in the scheme is restricting the energy integral to
    // [-L, L]; at the default L = 8a the tail is far below the 0.5% budget
    ProblemSpec spec = base_spec(2.0, 0.5, 512, 8.0);
    Solution sol8 = solve_dirichlet(spec);
    ProblemSpec wide = base_spec(2.0, 0.5, 1024, 16.0);  // same dx, doubled window
    Solution sol16 = solve_dirichlet(wide);
    CHECK(std::abs(sol16.energy - sol8.energy) / std::abs(sol8.energy) < 0.005);
  }

  TEST_CASE("weak residual grows under perturbation") {
    ProblemSpec spec = base_spec(2.0, 0.5, 256, 8.0);
    FracGradOperator op = FracGradOperator::assemble(spec.make_grid(), spec.s);
    DiscreteFunction u = dense_solve_p2(spec, op);
    double r0 = weak_residual(u, spec, op);

    Grid g = u.grid();
    std::vector<double> noisy(u.values().begin(), u.values().end());
    Rng rng;
    for (int j = g.domain_left_index() + 1; j < g.domain_right_index(); ++j)
      noisy[static_cast<size_t>(j)] *= 1.0 + 0.01 * rng.next();
    double r1 = weak_residual(DiscreteFunction(g, noisy), spec, op);
    CHECK(r1 > r0);
    CHECK(r1 > 1e-5);
  }

  TEST_CASE("degenerate normalization in the weak residual") {
    ProblemSpec spec = base_spec(2.0, 0.5, 128, 4.0);
    spec.rhs = [](double) { return 0.0; };
    Grid g = spec.make_grid();
    FracGradOperator op = FracGradOperator::assemble(g, spec.s);
    CHECK(weak_residual(DiscreteFunction::zero(g), spec, op) == 0.0);
    Rng rng;
    DiscreteFunction v = random_interior(g, rng);
    CHECK_THROWS_AS(weak_residual(v, spec, op), parameter_error);
  }

  TEST_CASE("homogeneity of the Euler-Lagrange operator (p = 3, f vs 8f)") {
    ProblemSpec spec = base_spec(3.0, 0.5, 256, 8.0);
    FracGradOperator op = FracGradOperator::assemble(spec.make_grid(), spec.s);
    Solution u1 = solve_dirichlet(spec, op);
    ProblemSpec scaled = spec;
    scaled.rhs = [](double) { return 8.0; };
    Solution u8 = solve_dirichlet(scaled, op);
    double factor = std::sqrt(8.0);  // 8^{1/(p-1)}
    double diff = 0.0, scale = 0.0;
    for (int j = 0; j < u1.u.size(); ++j) {
      diff = std::max(diff, std::abs(u8.u[j] - factor * u1.u[j]));
      scale = std::max(scale, std::abs(factor * u1.u[j]));
    }
    CHECK(diff / scale <= 1e-4);
  }

  TEST_CASE("stability table") {
    ProblemSpec spec = base_spec(2.0, 0.5, 256, 8.0);
    StabilityReport rep = stability_check(spec, {1.0, 10.0});
    CHECK(rep.pass);
    CHECK(rep.rows[0].ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.rows[1].ratio == doctest::Approx(10.0).epsilon(1e-3));
    CHECK_THROWS_AS(stability_check(spec, {-1.0}), parameter_error);
  }

  TEST_CASE("subquadratic solve via eps continuation") {
    ProblemSpec spec = base_spec(1.5, 0.5, 256, 8.0);
    Solution sol = solve_dirichlet(spec);
    CHECK(sol.eps_schedule_used.size() == spec.solver.eps_schedule.size());
    CHECK(sol.weak_residual <= 2e-6);
    CHECK(sol.u.interpolate(0.0) > 0.0);
    for (int j = 0; j < sol.u.size(); ++j)
      if (sol.u.grid().exterior_node(j)) CHECK(sol.u[j] == 0.0);
  }

  TEST_CASE("regularity modulus") {
    ProblemSpec spec = base_spec(2.0, 0.5, 512, 8.0);
    FracGradOperator op = FracGradOperator::assemble(spec.make_grid(), spec.s);
    Solution sol = solve_dirichlet(spec, op);

    CHECK(regularity_modulus(DiscreteFunction::zero(op.grid()), spec, op, 0.0, 0.25, 1.0) == 0.0);

    double w_interior = regularity_modulus(sol.u, spec, op, 0.0, 0.25, 1.0);
    CHECK(std::isfinite(w_interior));
    CHECK(w_interior > 0.0);

    double w_boundary = regularity_modulus(sol.u, spec, op, -1.0, 0.25, 1.0);
    CHECK(std::isfinite(w_boundary));

    // sup over a subset of directions never exceeds the full sup
    Grid g = op.grid();
    Cutoff phi = make_cutoff(0.0, 0.25, g);
    DirectionSet dirs = admissible_directions(g, 0.0, 0.25);
    double j0 = energy(sol.u, spec, op);
    double partial = 0.0;
    int used = 0;
    for (int m : dirs.steps) {
      if (m == 0 || used >= 5) continue;
      ++used;
      DiscreteFunction tv = localized_translate(sol.u, m * g.dx(), phi);
      partial = std::max(partial, std::abs(energy(tv, spec, op) - j0) / std::abs(m * g.dx()));
    }
    CHECK(partial <= w_interior + 1e-15);

    // no directions beyond {0}: rho so large both sides of the boundary block every step
    CHECK_THROWS_AS(regularity_modulus(sol.u, spec, op, 0.0, 1.5, 1.0), parameter_error);
  }
}

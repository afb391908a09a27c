#include <cmath>
#include <cstdio>
#include <string>

#include <doctest.h>

#include "fraclap/csvio.hpp"
#include "fraclap/grid.hpp"

using namespace fraclap;

namespace {

// deterministic xorshift for property tests
struct Rng {
  uint64_t state = 0x9e3779b97f4a7c15ull;
  double next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return (state >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
  }
};

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("uniform lattice arithmetic") {
    Grid g = build_grid(2.0, 1.0, 8);
    CHECK(g.dx() == 0.5);
    CHECK(g.n_nodes() == 9);
    CHECK(g.node(0) == -2.0);
    CHECK(g.node(8) == 2.0);
    CHECK(g.node(g.domain_left_index()) == -1.0);
    CHECK(g.node(g.domain_right_index()) == 1.0);

    Grid fine = build_grid(8.0, 1.0, 1024);
    CHECK(fine.dx() == 0.015625);
  }

  TEST_CASE("incompatible grid names the smallest compatible n_cells") {
    try {
      build_grid(2.0, 1.0, 6);
      FAIL("expected a configuration error");
    } catch (const parameter_error& e) {
      CHECK(std::string(e.what()).find("8") != std::string::npos);
    }
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 8), parameter_error);   // a == L
    CHECK_THROWS_AS(build_grid(2.0, -1.0, 8), parameter_error);
  }

  TEST_CASE("sampling with exterior zero") {
    Grid g = build_grid(2.0, 1.0, 16);
    DiscreteFunction ind = sample([](double) { return 1.0; }, g, true);
    for (int j = 0; j < g.n_nodes(); ++j) {
      if (std::abs(g.node(j)) >= 1.0) {
        CHECK(ind[j] == 0.0);
      } else {
        CHECK(ind[j] == 1.0);
      }
    }
    DiscreteFunction sq = sample([](double x) { return x * x; }, g, true);
    CHECK(sq[g.nearest_index(0.5)] == 0.25);
    CHECK(sq[g.nearest_index(1.5)] == 0.0);

    DiscreteFunction dome =
        sample([](double x) { double t = 1 - x * x; return t > 0 ? std::sqrt(t) : 0.0; }, g, true);
    CHECK(dome[g.nearest_index(0.0)] == 1.0);

    CHECK_THROWS_AS(sample([](double x) { return 1.0 / x; }, g, true), parameter_error);
  }

  TEST_CASE("nonzero exterior trace is rejected") {
    Grid g = build_grid(2.0, 1.0, 16);
    std::vector<double> v(static_cast<size_t>(g.n_nodes()), 1.0);
    CHECK_THROWS_AS(DiscreteFunction(g, v, false), parameter_error);
    DiscreteFunction ok(g, v, true);  // enforced
    CHECK(ok[0] == 0.0);
  }

  TEST_CASE("lp_norm quadrature") {
    Grid g = build_grid(2.0, 1.0, 2048);
    Region omega = inner_region(g, 0.0);

    std::vector<double> zero(static_cast<size_t>(g.n_nodes()), 0.0);
    CHECK(lp_norm(zero, 2.0, g, omega) == 0.0);

    std::vector<double> one(static_cast<size_t>(g.n_nodes()), 1.0);
    CHECK(lp_norm(one, 2.0, g, omega) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    std::vector<double> lin = sample_nodal([](double x) { return x; }, g);
    CHECK(lp_norm(lin, 2.0, g, omega) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-5));

    CHECK_THROWS_AS(lp_norm(one, 0.5, g, omega), parameter_error);
  }

  TEST_CASE("lp_norm homogeneity") {
    Grid g = build_grid(2.0, 1.0, 128);
    Rng rng;
    std::vector<double> v(static_cast<size_t>(g.n_nodes()));
    for (double& x : v) x = rng.next();
    Region omega = inner_region(g, 0.0);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      double base = lp_norm(v, p, g, omega);
      std::vector<double> w = v;
      for (double& x : w) x *= -7.25;
      CHECK(lp_norm(w, p, g, omega) == doctest::Approx(7.25 * base).epsilon(1e-13));
    }
  }

  TEST_CASE("parallel regions") {
    Grid g = build_grid(2.0, 1.0, 16);  // dx = 0.25
    Region omega = inner_region(g, 0.0);
    CHECK(omega.first == g.domain_left_index());
    CHECK(omega.last == g.domain_right_index());

    Region in = inner_region(g, 0.25);
    CHECK(g.node(in.first) == -0.5);  // +-0.75 sit exactly at distance lambda, excluded
    CHECK(g.node(in.last) == 0.5);

    Region out = outer_region(g, 0.5);
    CHECK(g.node(out.first) == -1.5);
    CHECK(g.node(out.last) == 1.5);

    CHECK_THROWS_AS(inner_region(g, 1.0), parameter_error);
    CHECK_THROWS_AS(inner_region(g, 2.0), parameter_error);
  }

  TEST_CASE("region monotonicity on index sets") {
    Grid g = build_grid(2.0, 1.0, 64);
    double prev_first = -1e9, prev_last = 1e9;
    for (double lam : {0.0, 0.1, 0.13, 0.25, 0.5, 0.77, 0.9}) {
      Region r = inner_region(g, lam);
      CHECK(r.first >= prev_first);
      CHECK(r.last <= prev_last);
      prev_first = r.first;
      prev_last = r.last;
    }
    prev_first = 1e9;
    prev_last = -1e9;
    for (double lam : {0.0, 0.1, 0.13, 0.25, 0.5, 1.0}) {
      Region r = outer_region(g, lam);
      CHECK(r.first <= prev_first);
      CHECK(r.last >= prev_last);
      prev_first = r.first;
      prev_last = r.last;
    }
  }

  TEST_CASE("shifted re-indexing") {
    Grid g = build_grid(2.0, 1.0, 8);
    std::vector<double> v = {0, 0, 1, 2, 3, 2, 1, 0, 0};
    std::vector<double> r = shifted(v, 2);
    CHECK(r[0] == 1.0);  // v[2]
    CHECK(r[8] == 0.0);
    std::vector<double> l = shifted(v, -2);
    CHECK(l[4] == 1.0);  // v[2]
    CHECK(g.step_of(0.5) == 1);
    CHECK(g.step_of(-1.0) == -2);
    CHECK_THROWS_AS(g.step_of(0.3), parameter_error);
  }

  TEST_CASE("function CSV round trip") {
    Grid g = build_grid(2.0, 1.0, 32);
    DiscreteFunction v = sample([](double x) { return std::sin(3.0 * x) * (std::abs(x) < 1); }, g, true);
    std::string path = "grid_roundtrip_test.csv";
    write_function_csv(path, g, v.values());
    LoadedFunction f = read_function_csv(path);
    REQUIRE(f.x.size() == static_cast<size_t>(g.n_nodes()));
    for (int j = 0; j < g.n_nodes(); ++j) {
      CHECK(f.x[static_cast<size_t>(j)] == doctest::Approx(g.node(j)).epsilon(1e-16));
      CHECK(f.u[static_cast<size_t>(j)] == v[j]);  // 17 digits round-trips doubles
    }
    std::remove(path.c_str());
  }
}

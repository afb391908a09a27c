// fraclap-lab: solve / measure / verify / sweep for the Riesz fractional
// p-Laplacian Dirichlet problem in 1-D.
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraclap/csvio.hpp"
#include "fraclap/harness.hpp"
#include "fraclap/kernels.hpp"

namespace {

using fraclap::RunConfig;

struct CliState {
  RunConfig cfg;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--p", st.cfg.p, "integrability exponent p > 1");
  cmd->add_option("--s", st.cfg.s, "fractional order s in (0,1)");
  cmd->add_option("--rhs", st.cfg.rhs, "right-hand side (const:<v>|bump|file:<path>)");
  cmd->add_option("--diffusivity", st.cfg.diffusivity, "diffusivity A (const:<v>|file:<path>)");
  cmd->add_option("--n", st.cfg.n, "number of grid cells (even)");
  cmd->add_option("--L", st.cfg.window_half_width,
                  "window half-width (default 8a solve, 2a measure/sweep)");
  cmd->add_option("--a", st.cfg.domain_half_width, "domain half-width");
  cmd->add_option("--tol", st.cfg.tol, "solver gradient tolerance");
  cmd->add_option("--out", st.cfg.out, "output CSV path");
  cmd->add_option("--hmin", st.cfg.h_min, "probe window lower end (default a/256)");
  cmd->add_option("--hmax", st.cfg.h_max, "probe window upper end (default a/16)");
  cmd->add_option("--workers", st.cfg.workers, "concurrent sweep rows");
  cmd->add_option("--config", st.config_path, "flat key=value config file; flags override");
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw fraclap::parameter_error("config value for '" + key + "' is not a number: " + value);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(parse_number(key, text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

// flat key=value file mirroring the CLI flags; '#' starts a comment; values
// already given on the command line win
void apply_config_file(CLI::App* cmd, CliState& st) {
  std::ifstream in(st.config_path);
  if (!in) throw fraclap::parameter_error("cannot open config file: " + st.config_path);
  auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw fraclap::parameter_error("config line " + std::to_string(lineno) + " is not key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    size_t vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);

    RunConfig& cfg = st.cfg;
    if (key == "p") { if (!given("--p")) cfg.p = parse_number(key, value); }
    else if (key == "s") { if (!given("--s")) cfg.s = parse_number(key, value); }
    else if (key == "rhs") { if (!given("--rhs")) cfg.rhs = value; }
    else if (key == "diffusivity") { if (!given("--diffusivity")) cfg.diffusivity = value; }
    else if (key == "field") { if (!given("--field")) cfg.field = value; }
    else if (key == "n") { if (!given("--n")) cfg.n = static_cast<int>(parse_number(key, value)); }
    else if (key == "L") { if (!given("--L")) cfg.window_half_width = parse_number(key, value); }
    else if (key == "a") { if (!given("--a")) cfg.domain_half_width = parse_number(key, value); }
    else if (key == "tol") { if (!given("--tol")) cfg.tol = parse_number(key, value); }
    else if (key == "out") { if (!given("--out")) cfg.out = value; }
    else if (key == "suite") { if (!given("--suite")) cfg.suite = value; }
    else if (key == "p-list") { if (!given("--p-list")) cfg.p_list = parse_list(key, value); }
    else if (key == "s-list") { if (!given("--s-list")) cfg.s_list = parse_list(key, value); }
    else if (key == "hmin") { if (!given("--hmin")) cfg.h_min = parse_number(key, value); }
    else if (key == "hmax") { if (!given("--hmax")) cfg.h_max = parse_number(key, value); }
    else if (key == "workers") { if (!given("--workers")) cfg.workers = static_cast<int>(parse_number(key, value)); }
    else if (key == "dump-operator") { if (!given("--dump-operator")) cfg.dump_operator = value; }
    else throw fraclap::parameter_error("unknown config key '" + key + "'");
  }
}

int do_solve(const RunConfig& cfg) {
  fraclap::ProblemSpec spec = cfg.problem(8.0);
  fraclap::FracGradOperator op = fraclap::FracGradOperator::assemble(spec.make_grid(), spec.s);
  if (!cfg.dump_operator.empty()) fraclap::write_operator_csv(cfg.dump_operator, op);
  fraclap::Solution sol = fraclap::solve_dirichlet(spec, op);
  std::printf("solve: p=%g s=%g n=%d L=%g  energy=%.12g  residual=%.3e  iters=%d\n", spec.p, spec.s,
              spec.n_cells, spec.window_half_width, sol.energy, sol.weak_residual, sol.iterations);
  double mid = sol.u.interpolate(0.0);
  std::printf("solve: u(0) = %.12g\n", mid);
  if (!cfg.out.empty()) {
    fraclap::write_solution_csv(cfg.out, sol, spec);
    std::printf("solve: wrote %s\n", cfg.out.c_str());
  }
  return 0;
}

int do_measure(const RunConfig& cfg) {
  fraclap::MeasureResult m =
      cfg.field.empty() ? fraclap::measure_solution(cfg) : fraclap::measure_field(cfg);
  std::printf("measure: slope=%.6g residual=%.3g npoints=%d", m.fit.slope, m.fit.residual,
              m.fit.npoints);
  if (m.predicted >= 0.0) std::printf("  predicted=%.6g", m.predicted);
  std::printf("\n");
  for (size_t i = 0; i < m.probe.h.size(); ++i)
    std::printf("measure: h=%.8g D=%.12g\n", m.probe.h[i], m.probe.values[i]);
  if (!cfg.out.empty()) {
    fraclap::write_probe_csv(cfg.out, m.probe, m.fit);
    std::printf("measure: wrote %s\n", cfg.out.c_str());
  }
  return 0;
}

int do_verify(const RunConfig& cfg) {
  std::vector<fraclap::CheckResult> checks = fraclap::run_verify_suite(cfg.suite, cfg);
  bool all = true;
  for (const fraclap::CheckResult& c : checks) {
    std::printf("[%s] %-42s measured=%.6g bound=%.6g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.measured, c.bound, c.detail.c_str());
    all = all && c.pass;
  }
  std::printf("verify: %s (%zu checks)\n", all ? "all passed" : "FAILURES", checks.size());
  return all ? 0 : 3;
}

int do_sweep(const RunConfig& cfg) {
  if (cfg.p_list.empty() || cfg.s_list.empty())
    throw fraclap::parameter_error("sweep requires --p-list and --s-list");
  std::vector<std::pair<double, double>> pairs;
  for (double p : cfg.p_list)
    for (double s : cfg.s_list) pairs.push_back({p, s});
  std::vector<fraclap::SweepRow> rows = fraclap::sweep_pairs(pairs, cfg);
  bool all_pass = true, any_conv = false, any_meas = false;
  for (const fraclap::SweepRow& r : rows) {
    if (!r.failure.empty()) {
      std::printf("[FAIL] p=%g s=%g  error: %s\n", r.p, r.s, r.failure.c_str());
      if (r.failure.find("iteration budget") != std::string::npos) any_conv = true;
      else any_meas = true;
      all_pass = false;
      continue;
    }
    std::printf("[%s] p=%g s=%g  predicted=%.4f measured=%.4f residual=%.3g  (config %s)\n",
                r.pass ? "PASS" : "FAIL", r.p, r.s, r.predicted, r.measured, r.residual,
                r.config_digest.c_str());
    all_pass = all_pass && r.pass;
  }
  std::string out = cfg.out.empty() ? "report.csv" : cfg.out;
  fraclap::write_report_csv(out, rows);
  std::printf("sweep: wrote %s\n", out.c_str());
  if (any_conv) return 2;
  if (!all_pass || any_meas) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the Riesz fractional p-Laplacian Dirichlet problem"};
  app.require_subcommand(1);

  CliState st;
  CLI::App* solve = app.add_subcommand("solve", "minimize the energy and write the solution CSV");
  CLI::App* measure =
      app.add_subcommand("measure", "probe Besov second differences and fit the decay exponent");
  CLI::App* verify = app.add_subcommand("verify", "run a named verification suite");
  CLI::App* sweep = app.add_subcommand("sweep", "solve+measure a (p,s) grid and compare predictions");

  for (CLI::App* cmd : {solve, measure, verify, sweep}) add_common_flags(cmd, st);
  solve->add_option("--dump-operator", st.cfg.dump_operator,
                    "write row,col,value CSV of the operator (n <= 64 only)");
  measure->add_option("--field", st.cfg.field,
                      "measure this field instead of solving (const:<v>|bump|abs|x2|sqrtdome|"
                      "powdome:<b>|file:<path>)");
  verify->add_option("--suite", st.cfg.suite, "duality|parity|commutator|pointwise|gradcheck|"
                                              "homogeneity|diffusivity|modulus|all");
  sweep->add_option("--p-list", st.cfg.p_list, "comma-separated p values")->delimiter(',');
  sweep->add_option("--s-list", st.cfg.s_list, "comma-separated s values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    CLI::App* active = solve->parsed() ? solve : measure->parsed() ? measure
                       : verify->parsed() ? verify : sweep;
    if (!st.config_path.empty()) apply_config_file(active, st);
    const RunConfig& cfg = st.cfg;
    if (solve->parsed()) return do_solve(cfg);
    if (measure->parsed()) return do_measure(cfg);
    if (verify->parsed()) return do_verify(cfg);
    if (sweep->parsed()) return do_sweep(cfg);
  } catch (const fraclap::convergence_error& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 2;
  } catch (const fraclap::measurement_error& e) {
    std::fprintf(stderr, "measurement error: %s\n", e.what());
    return 3;
  } catch (const fraclap::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

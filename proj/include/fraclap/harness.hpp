#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/csvio.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

/// Besov exponent the regularity theorems predict for the weak solution:
///   p >= 2   : s + min(1/p, s/(p-1))
///   1 < p < 2: s + min(1/2, s)
double predicted_exponent(double p, double s);

/// Scalar field parsed from a spec string.  Recognized forms:
///   const:<v>       constant
///   bump            quintic plateau bump, 1 on |x|<a/2, support (-a,a)
///   abs             |x|
///   x2              x^2
///   sqrtdome        (1-(x/a)^2)_+^{1/2}
///   powdome:<beta>  (1-(x/a)^2)_+^beta
///   file:<path>     piecewise-linear interpolant of an x,u CSV
struct FieldSpec {
  std::string text;
  std::function<double(double)> fn;
};

FieldSpec parse_field(const std::string& spec, double domain_half_width);

/// One CLI invocation worth of configuration; negative-valued numeric fields
/// mean "use the command's default".
struct RunConfig {
  double p = 2.0;
  double s = 0.5;
  std::string rhs = "const:1";
  std::string diffusivity;     // empty: A == 1
  std::string field;           // measure: probe this field instead of solving
  int n = 2048;
  double window_half_width = -1.0;  // default: 8a for solve, 2a for measure/sweep
  double domain_half_width = 1.0;
  double tol = -1.0;
  std::string out;
  std::string suite = "all";
  std::vector<double> p_list;
  std::vector<double> s_list;
  double h_min = -1.0;  // default 2^-8 a
  double h_max = -1.0;  // default 2^-4 a
  int workers = 2;
  std::string dump_operator;

  ProblemSpec problem(double default_window_factor) const;
};

struct CheckResult {
  std::string name;
  bool pass;
  double measured;
  double bound;
  std::string detail;
};

/// Named verification suites: duality, parity, commutator, pointwise,
/// gradcheck, homogeneity, diffusivity, modulus, or all.
std::vector<CheckResult> run_verify_suite(const std::string& suite, const RunConfig& config);
std::vector<std::string> verify_suite_names();

/// Solve + measure + compare against the predicted exponent for each pair;
/// a failed row is recorded and the sweep continues.  Rows are returned
/// sorted by (p, s).  Executes up to `workers` rows concurrently.
std::vector<SweepRow> sweep_pairs(const std::vector<std::pair<double, double>>& pairs,
                                  const RunConfig& config);

/// Measured slope of one solved problem (the measure command's core).
struct MeasureResult {
  BesovProbe probe;
  ExponentFit fit;
  double predicted = -1.0;
};

MeasureResult measure_solution(const RunConfig& config);
MeasureResult measure_field(const RunConfig& config);

}  // namespace fraclap

#pragma once

#include <string>
#include <vector>

#include "fraclap/besov.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

/// Writes `x,u` rows over the full window, 17 significant digits.
void write_function_csv(const std::string& path, const Grid& grid, std::span<const double> values);

/// Same, preceded by the solution metadata comment block
/// `# p,s,L,a,n,energy,residual,iters`.
void write_solution_csv(const std::string& path, const Solution& solution, const ProblemSpec& spec);

/// A function loaded from an `x,u` CSV; piecewise-linear, 0 outside the
/// tabulated range.  Comment lines (`#`) are skipped.
struct LoadedFunction {
  std::vector<double> x;
  std::vector<double> u;

  double operator()(double xq) const;
};

LoadedFunction read_function_csv(const std::string& path);

/// `h,D,logh,logD` rows plus a trailing `# fit,<slope>,<residual>,<npoints>`.
void write_probe_csv(const std::string& path, const BesovProbe& probe, const ExponentFit& fit);

struct SweepRow {
  double p = 0.0;
  double s = 0.0;
  double predicted = 0.0;
  double measured = 0.0;
  double residual = 0.0;
  bool pass = false;
  std::string failure;        // nonempty when the row's solve/measure failed
  std::string config_digest;  // provenance hash of the row's problem configuration
};

/// `p,s,predicted,measured,residual,pass` rows.
void write_report_csv(const std::string& path, const std::vector<SweepRow>& rows);

/// Debug dump `row,col,value`; refuses grids with more than 64 cells.
void write_operator_csv(const std::string& path, const FracGradOperator& op);

}  // namespace fraclap

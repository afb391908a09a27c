#include "fraclap/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fraclap {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_function_csv(const std::string& path, const Grid& grid, std::span<const double> values) {
  if (static_cast<int>(values.size()) != grid.n_nodes())
    throw parameter_error("write_function_csv: size mismatch");
  std::ofstream out = open_out(path);
  out << "x,u\n";
  for (int j = 0; j < grid.n_nodes(); ++j)
    out << fmt17(grid.node(j)) << ',' << fmt17(values[static_cast<size_t>(j)]) << '\n';
}

void write_solution_csv(const std::string& path, const Solution& solution, const ProblemSpec& spec) {
  std::ofstream out = open_out(path);
  out << "# p,s,L,a,n,energy,residual,iters\n";
  out << "# " << fmt17(spec.p) << ',' << fmt17(spec.s) << ',' << fmt17(spec.window_half_width) << ','
      << fmt17(spec.domain_half_width) << ',' << spec.n_cells << ',' << fmt17(solution.energy) << ','
      << fmt17(solution.weak_residual) << ',' << solution.iterations << '\n';
  out << "x,u\n";
  const Grid& grid = solution.u.grid();
  for (int j = 0; j < grid.n_nodes(); ++j)
    out << fmt17(grid.node(j)) << ',' << fmt17(solution.u[j]) << '\n';
}

double LoadedFunction::operator()(double xq) const {
  if (x.empty() || xq <= x.front() || xq >= x.back()) {
    // exact endpoint hits still count
    if (!x.empty() && xq == x.front()) return u.front();
    if (!x.empty() && xq == x.back()) return u.back();
    return 0.0;
  }
  size_t lo = 0, hi = x.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    (x[mid] <= xq ? lo : hi) = mid;
  }
  double t = (xq - x[lo]) / (x[hi] - x[lo]);
  return (1.0 - t) * u[lo] + t * u[hi];
}

LoadedFunction read_function_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot open input file: " + path);
  LoadedFunction f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("x,", 0) == 0) continue;  // header
    std::istringstream row(line);
    std::string xs, us;
    if (!std::getline(row, xs, ',') || !std::getline(row, us)) continue;
    try {
      double xv = std::stod(xs);
      double uv = std::stod(us);
      f.x.push_back(xv);
      f.u.push_back(uv);
    } catch (const std::exception&) {
      throw parameter_error("malformed CSV row in " + path + ": " + line);
    }
  }
  if (f.x.size() < 2) throw parameter_error("CSV " + path + " holds fewer than 2 samples");
  for (size_t i = 1; i < f.x.size(); ++i)
    if (!(f.x[i] > f.x[i - 1])) throw parameter_error("CSV " + path + " is not sorted in x");
  return f;
}

void write_probe_csv(const std::string& path, const BesovProbe& probe, const ExponentFit& fit) {
  std::ofstream out = open_out(path);
  out << "h,D,logh,logD\n";
  for (size_t i = 0; i < probe.h.size(); ++i) {
    double d = probe.values[i];
    out << fmt17(probe.h[i]) << ',' << fmt17(d) << ',' << fmt17(std::log(probe.h[i])) << ','
        << (d > 0.0 ? fmt17(std::log(d)) : "-inf") << '\n';
  }
  out << "# fit," << fmt17(fit.slope) << ',' << fmt17(fit.residual) << ',' << fit.npoints << '\n';
}

void write_report_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_out(path);
  out << "p,s,predicted,measured,residual,pass\n";
  for (const SweepRow& r : rows) {
    out << fmt17(r.p) << ',' << fmt17(r.s) << ',' << fmt17(r.predicted) << ',' << fmt17(r.measured)
        << ',' << fmt17(r.residual) << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

void write_operator_csv(const std::string& path, const FracGradOperator& op) {
  if (op.grid().n_cells() > 64)
    throw parameter_error("operator dump is limited to grids with n_cells <= 64");
  std::ofstream out = open_out(path);
  out << "row,col,value\n";
  int n = op.size();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      out << k << ',' << j << ',' << fmt17(op.entry(k, j)) << '\n';
}

}  // namespace fraclap

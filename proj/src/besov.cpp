#include "fraclap/besov.hpp"

#include <cmath>
#include <limits>

namespace fraclap {

double second_difference_norm(const DiscreteFunction& v, double p, double h) {
  const Grid& grid = v.grid();
  if (!(h > 0.0 && h < grid.domain_half_width()))
    throw parameter_error("second_difference_norm: need 0 < h < a");
  int m = grid.step_of(h);
  std::vector<double> d2 = shifted(v.values(), m);        // v_h
  std::vector<double> back = shifted(v.values(), -m);     // v_{-h}
  for (size_t j = 0; j < d2.size(); ++j) d2[j] += back[j] - 2.0 * v.values()[j];
  Region region = inner_region(grid, m * grid.dx());
  return lp_norm(d2, p, grid, region);
}

double besov_seminorm(const DiscreteFunction& v, double p, double q, double sigma,
                      double rho_ball) {
  const Grid& grid = v.grid();
  if (!(sigma > 0.0 && sigma < 2.0)) throw parameter_error("besov_seminorm: sigma must lie in (0,2)");
  if (!(q >= 1.0)) throw parameter_error("besov_seminorm: q must be >= 1");
  if (!(rho_ball > 0.0 && rho_ball < grid.domain_half_width()))
    throw parameter_error("besov_seminorm: rho_ball must lie in (0, a)");

  double dx = grid.dx();
  int m_max = static_cast<int>(std::floor(rho_ball / dx + 1e-9));
  if (m_max < 4) throw parameter_error("besov_seminorm: rho_ball below the 4 dx resolution floor");
  bool sup_form = std::isinf(q);
  double acc = 0.0;
  for (int m = 4; m <= m_max; ++m) {
    double h = m * dx;
    double d = second_difference_norm(v, p, h);
    if (sup_form) {
      acc = std::max(acc, d / std::pow(h, sigma));
    } else {
      acc += dx * std::pow(d, q) / std::pow(h, 1.0 + q * sigma);
    }
  }
  if (sup_form) return acc;
  return std::pow(q * sigma * (2.0 - sigma) * 2.0 * acc, 1.0 / q);
}

BesovProbe probe_function(const DiscreteFunction& v, double p, double h_min_request,
                          double h_max_request) {
  const Grid& grid = v.grid();
  if (!(p >= 1.0)) throw parameter_error("probe_function: p must be >= 1");
  double a = grid.domain_half_width();
  if (!(h_min_request > 0.0 && h_min_request < h_max_request && h_max_request < a))
    throw parameter_error("probe_function: need 0 < h_min < h_max < a");

  double floor_h = 4.0 * grid.dx();
  BesovProbe probe;
  probe.p = p;
  probe.vnorm = lp_norm(v, p, inner_region(grid, 0.0));
  probe.h_max = 0.0;
  probe.h_min = std::numeric_limits<double>::infinity();
  for (int k = 0; a * std::pow(0.5, k) >= h_min_request * (1.0 - 1e-12); ++k) {
    double h = a * std::pow(0.5, k);
    if (h > h_max_request * (1.0 + 1e-12)) continue;
    if (h < floor_h * (1.0 - 1e-12)) break;  // resolution-limited
    double t = h / grid.dx();
    if (std::abs(t - std::round(t)) > 1e-9) continue;  // not a node multiple
    probe.h.push_back(h);
    probe.values.push_back(second_difference_norm(v, p, h));
    probe.h_max = std::max(probe.h_max, h);
    probe.h_min = std::min(probe.h_min, h);
  }
  if (probe.h.empty()) probe.h_min = 0.0;
  return probe;
}

ExponentFit fit_exponent(const BesovProbe& probe) {
  std::vector<double> lx, ly;
  double floor = 1e-14 * probe.vnorm;
  for (size_t i = 0; i < probe.h.size(); ++i) {
    if (probe.values[i] > floor) {
      lx.push_back(std::log(probe.h[i]));
      ly.push_back(std::log(probe.values[i]));
    }
  }
  int n = static_cast<int>(lx.size());
  if (n < 4)
    throw measurement_error("fit_exponent: fewer than 4 usable probe points (" + std::to_string(n) +
                            ")");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[static_cast<size_t>(i)];
    my += ly[static_cast<size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    double dxi = lx[static_cast<size_t>(i)] - mx;
    sxx += dxi * dxi;
    sxy += dxi * (ly[static_cast<size_t>(i)] - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.npoints = n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = ly[static_cast<size_t>(i)] - my - fit.slope * (lx[static_cast<size_t>(i)] - mx);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace fraclap

#include "fraclap/gamma.hpp"

#include <cmath>

namespace fraclap {

namespace {

// Lanczos coefficients for g = 7 (the classic 9-term set).
constexpr double kG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kPi = 3.14159265358979323846264338327950288;

double lanczos_core(double z) {
  // valid for z >= 0.5
  z -= 1.0;
  double x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + i);
  double t = z + kG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x)) throw parameter_error("gamma_fn: non-finite argument");
  if (x <= 0.0 && x == std::floor(x)) throw parameter_error("gamma_fn: pole at non-positive integer");
  if (x < 0.5) return kPi / (std::sin(kPi * x) * lanczos_core(1.0 - x));
  return lanczos_core(x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw parameter_error("log_gamma: argument must be positive");
  if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
  double z = x - 1.0;
  double acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
  double t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double mu(int dim, double s) {
  if (dim < 1) throw parameter_error("mu: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw parameter_error("mu: order s must lie in (0,1)");
  double num = std::pow(2.0, s) * gamma_fn((dim + s + 1.0) / 2.0);
  double den = std::pow(kPi, dim / 2.0) * gamma_fn((1.0 - s) / 2.0);
  return num / den;
}

FracConstant frac_constant(int dim, double s) { return {dim, s, mu(dim, s)}; }

}  // namespace fraclap

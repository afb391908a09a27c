#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument, configuration, resolution or geometry problem.  CLI exit code 1.
struct parameter_error : error {
  using error::error;
};

/// Optimizer exhausted its iteration budget.  CLI exit code 2.
struct convergence_error : error {
  using error::error;
};

/// A measurement (probe/fit) could not be carried out.  CLI exit code 3.
struct measurement_error : error {
  using error::error;
};

/// Non-finite value encountered mid-computation.
struct numeric_error : error {
  using error::error;
};

}  // namespace fraclap

#pragma once

#include <stdexcept>
#include <string>

namespace synclab {

/// Invalid caller input: out-of-range ids, malformed files, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative routine failed to converge or produced non-finite values.
/// Carries the best estimate available at the time of failure.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double best_estimate = 0.0, double residual = 0.0)
      : std::runtime_error(what), best_estimate_(best_estimate), residual_(residual) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double best_estimate_;
  double residual_;
};

}  // namespace synclab

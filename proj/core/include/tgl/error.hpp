#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tgl {

// Bad input to an operation: violated precondition, malformed config, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TuningFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyTruncation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidOperator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonExtendableMode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by the iterative eigensolver when the restart cap is reached.
// Carries the residual estimates of the wanted pairs at the last restart.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> best_residuals)
      : std::runtime_error(what), best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

}  // namespace tgl

#pragma once

#include <stdexcept>
#include <string>

namespace cvdyn {

// Bad caller input: sizes, ranges, preconditions.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A covariance matrix that does not describe a physical Gaussian state.
struct InvalidState : std::domain_error {
  using std::domain_error::domain_error;
};

// Overflow, non-finite results, failed factorizations.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scenario whose premise does not hold (e.g. nothing to destroy).
struct InvalidScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration file. line() is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace cvdyn

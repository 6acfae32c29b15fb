// Error types shared by the simulator modules.
//
// Precondition violations on user input are reported as std::invalid_argument
// (or std::out_of_range for index arguments). The types below cover the
// failure classes the command-line front end maps onto distinct exit codes.

#ifndef QND_ERRORS_HPP
#define QND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnd {

/// A run configuration (file, preset or flag) is malformed or inconsistent.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested target cannot be realised with physical pulses.
class InfeasibleTarget : public std::runtime_error {
 public:
  InfeasibleTarget(const std::string& what, double max_achievable_coupling)
      : std::runtime_error(what), max_achievable_coupling_(max_achievable_coupling) {}

  double max_achievable_coupling() const noexcept { return max_achievable_coupling_; }

 private:
  double max_achievable_coupling_;
};

/// The target transforms to an all-zero squeezing profile.
class DegenerateTarget : public std::runtime_error {
 public:
  DegenerateTarget() : std::runtime_error("degenerate target") {}
  explicit DegenerateTarget(const std::string& what) : std::runtime_error(what) {}
};

/// A covariance state left the physically admissible set.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qnd

#endif  // QND_ERRORS_HPP

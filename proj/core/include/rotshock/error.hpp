#pragma once

#include <stdexcept>
#include <string>

namespace rotshock {

// Error categories map onto CLI exit codes: configuration problems, degenerate
// backgrounds, failure to place the shock, and non-convergence.
enum class ErrorKind {
  InvalidState,
  Vacuum,
  Precondition,
  Config,
  DegenerateBackground,
  DegenerateSelection,
  OutOfRange,
  Incompatible,
  NonConvergence,
  TrustRegion,
  Cfl,
  FlowReversal,
  NotSupersonic,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The offending quantity (defect, residual, bracket end, ...), when one exists.
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

const char* to_string(ErrorKind kind) noexcept;

// Process exit status for the command-line tool: 1 configuration, 2 invalid or
// degenerate background, 3 no admissible shock position, 4 non-convergence.
int exit_code(ErrorKind kind) noexcept;

}  // namespace rotshock

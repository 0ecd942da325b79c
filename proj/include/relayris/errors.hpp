// Error types thrown by the inner beamforming solvers. The phase search
// treats every SolveError as an infeasible candidate rather than a fatal
// condition.
#pragma once

#include <stdexcept>
#include <string>

namespace relayris {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective channel offers fewer usable modes / independent rows than the
// requested number of streams.
class RankDeficientError : public SolveError {
 public:
  using SolveError::SolveError;
};

// Dual-power fixed point failed to reach tolerance within the iteration cap.
class ConvergenceError : public SolveError {
 public:
  ConvergenceError(const std::string& msg, double last_residual, unsigned long iterations)
      : SolveError(msg), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  unsigned long iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  unsigned long iterations_;
};

// SINR targets that no precoder can meet (negative downlink powers, singular
// coupling matrix, zero channel with a positive target).
class InfeasibleTargetsError : public SolveError {
 public:
  using SolveError::SolveError;
};

}  // namespace relayris

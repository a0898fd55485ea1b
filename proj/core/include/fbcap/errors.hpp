#ifndef FBCAP_ERRORS_HPP
#define FBCAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fbcap {

/// Invalid or inconsistent user-supplied configuration (bad coefficients,
/// malformed JSON, out-of-range parameters). CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to produce a usable answer (fixed point did
/// not converge, bracket failure, infeasible program). Carries the residual
/// that was left when the solver gave up. CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

class NonConvergent : public SolverError {
public:
  using SolverError::SolverError;
};

class Infeasible : public SolverError {
public:
  using SolverError::SolverError;
};

class BracketFailure : public SolverError {
public:
  using SolverError::SolverError;
};

/// A dynamic-programming trajectory left the configured covariance grid,
/// which means the grid bounds were chosen too tight for the channel/price.
class GridEscape : public SolverError {
public:
  using SolverError::SolverError;
};

/// Floating-point drift exceeded what symmetrization/clamping is allowed to
/// absorb; indicates a genuine bug rather than roundoff.
class InternalInconsistency : public std::logic_error {
public:
  explicit InternalInconsistency(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace fbcap

#endif  // FBCAP_ERRORS_HPP

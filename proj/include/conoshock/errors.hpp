#ifndef CONOSHOCK_ERRORS_HPP
#define CONOSHOCK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace conoshock {

// Base class for all solver failures so callers can catch one type.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : SolverError {
  explicit DomainError(const std::string& msg) : SolverError(msg) {}
};

// Bernoulli argument went non-positive.
struct CavitationError : SolverError {
  explicit CavitationError(const std::string& msg) : SolverError(msg) {}
};

struct RootNotFoundError : SolverError {
  explicit RootNotFoundError(const std::string& msg) : SolverError(msg) {}
};

struct AmbiguityError : SolverError {
  explicit AmbiguityError(const std::string& msg) : SolverError(msg) {}
};

// Sonic degeneration of the conical-flow ODE denominator.
struct DegeneracyError : SolverError {
  explicit DegeneracyError(const std::string& msg) : SolverError(msg) {}
};

// Slip condition never reached during the background integration.
struct NoConeError : SolverError {
  explicit NoConeError(const std::string& msg) : SolverError(msg) {}
};

// Mode system close to singular (condition estimate above cap).
struct SpectralProximityError : SolverError {
  explicit SpectralProximityError(const std::string& msg) : SolverError(msg) {}
};

// Data does not decay enough at the truncated strip ends.
struct TruncationError : SolverError {
  explicit TruncationError(const std::string& msg) : SolverError(msg) {}
};

// Fixed-point iteration with measured rate >= cap.
struct NonContractionError : SolverError {
  explicit NonContractionError(const std::string& msg) : SolverError(msg) {}
};

// Coordinate map Jacobian denominator degenerate.
struct FoldError : SolverError {
  explicit FoldError(const std::string& msg) : SolverError(msg) {}
};

struct ShockDegeneracyError : SolverError {
  explicit ShockDegeneracyError(const std::string& msg) : SolverError(msg) {}
};

struct AdmissibilityError : SolverError {
  explicit AdmissibilityError(const std::string& msg) : SolverError(msg) {}
};

struct ConfigError : SolverError {
  explicit ConfigError(const std::string& msg) : SolverError(msg) {}
};

}  // namespace conoshock

#endif

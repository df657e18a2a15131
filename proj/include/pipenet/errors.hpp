#ifndef PIPENET_ERRORS_HPP
#define PIPENET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pipenet {

/// Base class for all pipenet failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A state violates physical bounds (nonpositive density/pressure, EOS out of range).
class NonPhysicalState : public Error {
 public:
  explicit NonPhysicalState(const std::string& msg) : Error(msg) {}
};

/// The algebraic pipe model ran out of pressure before the pipe end.
class PressureExhausted : public Error {
 public:
  explicit PressureExhausted(const std::string& msg) : Error(msg) {}
};

/// A nonlinear solve failed to converge within its iteration cap.
class SolverDiverged : public Error {
 public:
  explicit SolverDiverged(const std::string& msg) : Error(msg) {}
};

/// A refinement strategy cannot bring the network error below tolerance.
class Unsatisfiable : public Error {
 public:
  explicit Unsatisfiable(const std::string& msg) : Error(msg) {}
};

/// A cost delta came out nonpositive; error-to-cost ratios are ill-defined.
class DegenerateCostDelta : public Error {
 public:
  explicit DegenerateCostDelta(const std::string& msg) : Error(msg) {}
};

/// No scheme within the search depth satisfies the knapsack constraint.
class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& msg) : Error(msg) {}
};

/// Malformed configuration or network file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace pipenet

#endif  // PIPENET_ERRORS_HPP

#pragma once
#include <stdexcept>
#include <string>

namespace invscat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input outside the domain of an operation (grid range, sign of kappa, ...).
struct RangeError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
// Oscillation or root scan not resolved by the sampling.
struct ResolutionError : Error { using Error::Error; };

struct ClassViolationError : Error { using Error::Error; };
struct DivergenceError : Error {
  DivergenceError(const std::string& what, double residual)
      : Error(what), last_residual(residual) {}
  double last_residual;
};
struct NearZeroJostError : Error { using Error::Error; };
struct DegenerateZeroError : Error { using Error::Error; };
struct InconsistentDataError : Error { using Error::Error; };
struct SynthesisError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };
struct SingularityError : Error {
  SingularityError(const std::string& what, long row) : Error(what), row(row) {}
  long row;
};
struct ContractionError : Error { using Error::Error; };
struct IterationCapError : Error { using Error::Error; };
struct ThresholdNotFoundError : Error { using Error::Error; };

// File-format problems; `where` names the file and field.
struct ParseError : Error {
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where(where) {}
  std::string where;
};
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace invscat

#pragma once

#include <stdexcept>
#include <string>

namespace kpoint {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KPOINT_ERROR(Name)                 \
  class Name : public Error {              \
   public:                                 \
    explicit Name(const std::string& what) \
        : Error(#Name ": " + what) {}      \
  }

KPOINT_ERROR(DomainError);
KPOINT_ERROR(NumericalError);
KPOINT_ERROR(DivisionByIntervalContainingZero);
KPOINT_ERROR(NegativeSqrt);
KPOINT_ERROR(NotPositiveDefinite);
KPOINT_ERROR(ConvergenceFailure);
KPOINT_ERROR(SizeTooLarge);
KPOINT_ERROR(NotInCatalog);
KPOINT_ERROR(InvalidParameters);
KPOINT_ERROR(IoError);
KPOINT_ERROR(ParseError);
KPOINT_ERROR(NumericalBreakdown);
KPOINT_ERROR(SolverProcessFailure);
KPOINT_ERROR(ConventionMismatch);
KPOINT_ERROR(DimensionMismatch);
KPOINT_ERROR(UnrealizableCode);
KPOINT_ERROR(TooLarge);

#undef KPOINT_ERROR

}  // namespace kpoint

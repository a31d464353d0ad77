#pragma once

#include <stdexcept>
#include <string>

namespace cgame {

enum class ErrorCode {
  kDimensionMismatch,
  kDimensionTooLarge,
  kNoSolution,
  kInvalidGeometry,
  kGeometryUnverified,
  kGridBudgetExceeded,
  kIncompatibleData,
  kNotCondition41,
  kInvalidSpec,
  kInadmissibleVelocity,
  kInvalidArgument,
  kParse,
  kIo,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// command-line front end can map it onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cgame

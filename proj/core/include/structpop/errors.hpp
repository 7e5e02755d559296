#ifndef STRUCTPOP_ERRORS_HPP
#define STRUCTPOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace structpop {

enum class ErrorCode {
    NonPositiveGrowth,
    NegativeRate,
    MalformedTable,
    MalformedConfig,
    GridTooCoarse,
    OutOfDomain,
    NoRoot,
    StepMismatch,
    HorizonTooLong,
    DegenerateWeight,
    CflViolation,
    DegenerateTrajectory,
    NotCritical,
    OutOfWindow,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. Carries a machine-checkable code plus a
/// human-readable message with the offending values.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace structpop

#endif

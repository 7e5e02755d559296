#include "structpop/errors.hpp"

namespace structpop {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveGrowth: return "NonPositiveGrowth";
        case ErrorCode::NegativeRate: return "NegativeRate";
        case ErrorCode::MalformedTable: return "MalformedTable";
        case ErrorCode::MalformedConfig: return "MalformedConfig";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::StepMismatch: return "StepMismatch";
        case ErrorCode::HorizonTooLong: return "HorizonTooLong";
        case ErrorCode::DegenerateWeight: return "DegenerateWeight";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::DegenerateTrajectory: return "DegenerateTrajectory";
        case ErrorCode::NotCritical: return "NotCritical";
        case ErrorCode::OutOfWindow: return "OutOfWindow";
    }
    return "UnknownError";
}

}  // namespace structpop

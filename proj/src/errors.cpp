#include "fpuwave/errors.hpp"

namespace fpuwave {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::ContourThroughRoot: return "ContourThroughRoot";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ParameterSignError: return "ParameterSignError";
    case ErrorKind::ExistenceConditionViolated: return "ExistenceConditionViolated";
    case ErrorKind::NonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::TailNotResolved: return "TailNotResolved";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace fpuwave

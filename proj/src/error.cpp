#include "halfline/error.hpp"

namespace halfline {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DomainTooShort: return "domain_too_short";
    case ErrorCode::Configuration: return "configuration";
    case ErrorCode::DomainViolation: return "domain_violation";
    case ErrorCode::InternalConsistency: return "internal_consistency";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

} // namespace halfline

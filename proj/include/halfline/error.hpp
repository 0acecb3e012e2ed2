#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

enum class ErrorCode {
    InvalidArgument,
    DomainTooShort,
    Configuration,
    DomainViolation,
    InternalConsistency,
    Parse,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Library exception. `hypothesis` names the violated modelling hypothesis
/// (empty for plain argument errors) so front ends can report it verbatim.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string hypothesis = {})
        : std::runtime_error(message), code_(code), hypothesis_(std::move(hypothesis))
    {
    }

    ErrorCode code() const noexcept { return code_; }
    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    ErrorCode code_;
    std::string hypothesis_;
};

} // namespace halfline

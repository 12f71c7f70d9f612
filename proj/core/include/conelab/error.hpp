// Error type shared by all conelab modules.
#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

enum class ErrorCode {
    NonConvergence,
    DomainError,
    PoleError,
    BracketFailure,
    BracketExhausted,
    IntegrationFailure,
    PoleEncountered,
    VariantUnavailable,
    RangeUnsupported,
    InvalidParams
};

const char* to_string(ErrorCode c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace conelab

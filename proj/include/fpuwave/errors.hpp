#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpuwave {

enum class ErrorKind {
    NoConvergence,
    BracketFailure,
    ContourThroughRoot,
    GridTooCoarse,
    ParameterSignError,
    ExistenceConditionViolated,
    NonPowerOfTwo,
    WindowTooSmall,
    TailNotResolved,
    DomainTooSmall,
    BlowUp,
    InvalidArgument,
    Config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Usage errors map to exit code 64, everything else is a numerical failure.
inline bool is_usage_error(ErrorKind k) {
    return k == ErrorKind::Config || k == ErrorKind::InvalidArgument;
}

}  // namespace fpuwave

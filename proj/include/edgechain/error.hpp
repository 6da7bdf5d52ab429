#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgechain {

enum class ErrorKind {
    InvalidInput,
    BaselineDegenerate,
    IncompleteData,
    Instability,
    ConstraintViolation,
    Infeasible,
    Configuration,
    Parse,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput:        return "invalid-input";
        case ErrorKind::BaselineDegenerate:  return "baseline-degenerate";
        case ErrorKind::IncompleteData:      return "incomplete-data";
        case ErrorKind::Instability:         return "instability";
        case ErrorKind::ConstraintViolation: return "constraint-violation";
        case ErrorKind::Infeasible:          return "infeasible";
        case ErrorKind::Configuration:       return "configuration";
        case ErrorKind::Parse:               return "parse";
    }
    return "unknown";
}

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace edgechain

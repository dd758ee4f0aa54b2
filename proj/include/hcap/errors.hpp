#pragma once

#include <stdexcept>
#include <string>

namespace hcap {

enum class ErrorCode {
    NonStochastic,
    SizeOutOfRange,
    NegativeEntry,
    NotADistribution,
    DimensionMismatch,
    ConvergenceFailure,
    QueryOutOfRange,
    TooLarge,
    NotModAdditive,
    RhTooSmall,
    LengthMismatch,
    ConfigTooLarge,
    NumericalFailure,
    ParseFailure,
    InvalidArgument,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonStochastic: return "NonStochastic";
        case ErrorCode::SizeOutOfRange: return "SizeOutOfRange";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::NotADistribution: return "NotADistribution";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::QueryOutOfRange: return "QueryOutOfRange";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::NotModAdditive: return "NotModAdditive";
        case ErrorCode::RhTooSmall: return "RhTooSmall";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ConfigTooLarge: return "ConfigTooLarge";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::ParseFailure: return "ParseFailure";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Library-wide exception carrying a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace hcap

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace massent {

enum class ErrorCode {
    InvalidArgument,
    NonXForm,
    NotAState,
    LambdaSingular,
    StepUnderflow,
    AssumptionViolated,
    FrozenDynamics,
    NonConvergedMax,
    NoGeneration,
    SweepCellFailed,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonXForm: return "NonXForm";
        case ErrorCode::NotAState: return "NotAState";
        case ErrorCode::LambdaSingular: return "LambdaSingular";
        case ErrorCode::StepUnderflow: return "StepUnderflow";
        case ErrorCode::AssumptionViolated: return "AssumptionViolated";
        case ErrorCode::FrozenDynamics: return "FrozenDynamics";
        case ErrorCode::NonConvergedMax: return "NonConvergedMax";
        case ErrorCode::NoGeneration: return "NoGeneration";
        case ErrorCode::SweepCellFailed: return "SweepCellFailed";
    }
    return "Unknown";
}

// All library failures surface as this type; code() distinguishes them.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

inline void require(bool ok, ErrorCode code, const char* what) {
    if (!ok) throw Error(code, what);
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite");
    }
}

}  // namespace detail
}  // namespace massent

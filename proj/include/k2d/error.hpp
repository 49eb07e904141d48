#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace k2d {

/// Machine-readable failure categories. The CLI prints `to_string(code)`.
enum class ErrorCode {
    malformed_rational,
    division_by_zero,
    float_overflow,
    out_of_range,
    invalid_probability,
    invalid_parameters,
    nonterminating_series,
    no_convergence,
    zero_denominator,
    region_violation,
    delta_zero,
    dual_singular,
    singular_system,
    non_orthogonal,
    size_mismatch,
    eigensolver_failure,
    usage,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::malformed_rational: return "MALFORMED_RATIONAL";
        case ErrorCode::division_by_zero: return "DIVISION_BY_ZERO";
        case ErrorCode::float_overflow: return "FLOAT_OVERFLOW";
        case ErrorCode::out_of_range: return "OUT_OF_RANGE";
        case ErrorCode::invalid_probability: return "INVALID_PROBABILITY";
        case ErrorCode::invalid_parameters: return "INVALID_PARAMETERS";
        case ErrorCode::nonterminating_series: return "NONTERMINATING_SERIES";
        case ErrorCode::no_convergence: return "NO_CONVERGENCE";
        case ErrorCode::zero_denominator: return "ZERO_DENOMINATOR";
        case ErrorCode::region_violation: return "REGION_VIOLATION";
        case ErrorCode::delta_zero: return "DELTA_ZERO";
        case ErrorCode::dual_singular: return "DUAL_SINGULAR";
        case ErrorCode::singular_system: return "SINGULAR_SYSTEM";
        case ErrorCode::non_orthogonal: return "NON_ORTHOGONAL";
        case ErrorCode::size_mismatch: return "SIZE_MISMATCH";
        case ErrorCode::eigensolver_failure: return "EIGENSOLVER_FAILURE";
        case ErrorCode::usage: return "USAGE";
    }
    return "UNKNOWN";
}

/// The single exception type thrown by the library. Every failure the caller
/// can provoke with bad input carries an ErrorCode; internal invariant
/// violations throw std::logic_error instead.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace k2d

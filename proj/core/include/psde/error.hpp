#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace psde {

/// Failure categories surfaced by the numerical core.
///
/// The CLI maps these onto process exit codes, so keep the set small and
/// stable.
enum class ErrorCode {
    InvalidArgument,   ///< caller violated a precondition
    NoConvergence,     ///< fixed-point / Picard budget exhausted
    CaseInconsistent,  ///< per-step case classification contradicted itself
    NonFinite,         ///< NaN or overflow in coefficients or state
    QuadratureFail,    ///< adaptive quadrature could not reach tolerance
    SigmaNotPositive,  ///< Lamperti transform needs sigma > 0 on its range
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying an ErrorCode and, for iterative solvers, the history of
/// the convergence measure up to the failure.
class NumericalError : public std::runtime_error {
public:
    NumericalError(ErrorCode code, const std::string& what,
                   std::vector<double> history = {})
        : std::runtime_error(what), code_(code), history_(std::move(history)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<double>& history() const noexcept { return history_; }

private:
    ErrorCode code_;
    std::vector<double> history_;
};

}  // namespace psde

#include "psde/params.hpp"

#include "psde/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace psde {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::CaseInconsistent: return "CASE_INCONSISTENT";
        case ErrorCode::NonFinite: return "NON_FINITE";
        case ErrorCode::QuadratureFail: return "QUADRATURE_FAIL";
        case ErrorCode::SigmaNotPositive: return "SIGMA_NOT_POSITIVE";
    }
    return "UNKNOWN";
}

const char* to_string(ParamRejection r) noexcept {
    switch (r) {
        case ParamRejection::None: return "NONE";
        case ParamRejection::Alpha: return "REJECT_ALPHA";
        case ParamRejection::Beta: return "REJECT_BETA";
        case ParamRejection::Rho: return "REJECT_RHO";
    }
    return "UNKNOWN";
}

double compute_rho(double alpha, double beta) noexcept {
    return alpha * beta / ((1.0 - alpha) * (1.0 - beta));
}

namespace {

// rho >= 1  <=>  alpha + beta >= 1           (given alpha, beta < 1)
// rho <= -1 <=>  beta (2 alpha - 1) <= alpha - 1
bool rho_out_of_range(double alpha, double beta) {
    if (alpha + beta >= 1.0) {
        return true;
    }
    const double slope = 2.0 * alpha - 1.0;
    if (slope == 0.0) {
        return false;
    }
    const double curve = (alpha - 1.0) / slope;
    return slope < 0.0 ? beta >= curve : beta <= curve;
}

}  // namespace

ParamsValidation validate_params(double alpha, double beta) {
    ParamsValidation out;
    std::ostringstream msg;
    if (!std::isfinite(alpha) || alpha >= 1.0) {
        out.rejection = ParamRejection::Alpha;
        msg << "alpha = " << alpha << " violates alpha < 1";
        out.message = msg.str();
        out.rho = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    if (!std::isfinite(beta) || beta >= 1.0) {
        out.rejection = ParamRejection::Beta;
        msg << "beta = " << beta << " violates beta < 1";
        out.message = msg.str();
        out.rho = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.rho = compute_rho(alpha, beta);
    if (rho_out_of_range(alpha, beta)) {
        out.rejection = ParamRejection::Rho;
        msg.precision(17);
        msg << "rho = " << out.rho << " violates |rho| < 1 (alpha = " << alpha
            << ", beta = " << beta << ")";
        out.message = msg.str();
        return out;
    }
    out.params = PerturbationParams{alpha, beta, out.rho};
    return out;
}

PerturbationParams make_params(double alpha, double beta) {
    auto v = validate_params(alpha, beta);
    if (!v) {
        throw NumericalError(ErrorCode::InvalidArgument, v.message);
    }
    return *v.params;
}

double smoothness_constant(double t, double alpha, double beta, double b_prime_sup) {
    const double q = 3.0 * (b_prime_sup * b_prime_sup * t + 4.0 * (alpha * alpha + beta * beta));
    return q + 2.0 * std::sqrt(q);
}

SmoothnessConstants smooth_density_horizon(double alpha, double beta, double b_prime_sup) {
    SmoothnessConstants out;
    const double margin = kSmoothThreshold - (alpha * alpha + beta * beta);
    out.threshold_ok = margin > kSmoothThresholdTol;

    if (b_prime_sup == 0.0) {
        out.t0_infinite = true;
        out.t0 = out.threshold_ok ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
        out.c_of_t = smoothness_constant(0.0, alpha, beta, 0.0);
        return out;
    }
    // (sqrt2 - 1)^2 / 3 - 4 s = 4 (kSmoothThreshold - s)
    out.t0 = 4.0 * margin / (b_prime_sup * b_prime_sup);
    if (!out.threshold_ok && margin >= -kSmoothThresholdTol) {
        out.t0 = 0.0;
    }
    out.c_of_t = smoothness_constant(std::max(out.t0, 0.0), alpha, beta, b_prime_sup);
    return out;
}

HNormBound hnorm_lower_bound(double s, double t, double sigma, double alpha, double beta,
                             double b_prime_sup) {
    if (!(s > 0.0) || !(s <= t)) {
        throw NumericalError(ErrorCode::InvalidArgument, "hnorm_lower_bound needs 0 < s <= t");
    }
    const double c = smoothness_constant(t, alpha, beta, b_prime_sup);
    if (c >= 1.0) {
        return {0.0, true};
    }
    const double denom = 2.0 * (1.0 + 3.0 * b_prime_sup * b_prime_sup * s * s +
                                3.0 * (alpha * alpha + beta * beta));
    return {(1.0 - c) * sigma * sigma * s * s / denom, false};
}

}  // namespace psde

#pragma once

#include <numbers>
#include <optional>
#include <string>

namespace psde {

/// Shape parameters (alpha, beta) of the doubly perturbed equation
///   X_t = x + int sigma(X) dW + int b(X) ds + alpha max X + beta min X
/// together with the compound parameter rho = alpha beta / ((1-alpha)(1-beta)).
///
/// Only obtainable through validate_params / make_params, so every instance
/// satisfies alpha < 1, beta < 1, alpha + beta < 1 and |rho| < 1.
struct PerturbationParams {
    double alpha = 0.0;
    double beta = 0.0;
    double rho = 0.0;

    /// 1 - alpha - beta, strictly positive for valid parameters.
    double unperturbed_divisor() const noexcept { return 1.0 - alpha - beta; }
};

enum class ParamRejection { None, Alpha, Beta, Rho };

const char* to_string(ParamRejection r) noexcept;

struct ParamsValidation {
    std::optional<PerturbationParams> params;
    ParamRejection rejection = ParamRejection::None;
    double rho = 0.0;  // reported even on rejection when alpha, beta < 1
    std::string message;

    explicit operator bool() const noexcept { return params.has_value(); }
};

double compute_rho(double alpha, double beta) noexcept;

/// Strict-inequality check of the admissible domain.
///
/// The |rho| < 1 test is evaluated through the two boundary curves of the
/// domain (alpha + beta = 1 and beta = (alpha-1)/(2 alpha-1)) instead of the
/// rounded quotient, so pairs typed exactly on a boundary are rejected.
ParamsValidation validate_params(double alpha, double beta);

/// validate_params that throws NumericalError(InvalidArgument) on rejection.
PerturbationParams make_params(double alpha, double beta);

/// (3 - 2 sqrt 2) / 12: the bound on alpha^2 + beta^2 below which the
/// smooth-density horizon t0 is positive.
inline constexpr double kSmoothThreshold = (3.0 - 2.0 * std::numbers::sqrt2) / 12.0;

/// Pairs whose alpha^2 + beta^2 lies within this distance below
/// kSmoothThreshold are treated as on the boundary.
inline constexpr double kSmoothThresholdTol = 1e-12;

/// C(t, alpha, beta, b) = 3q + 2 sqrt(3q), q = ||b'||^2 t + 4 (alpha^2 + beta^2).
double smoothness_constant(double t, double alpha, double beta, double b_prime_sup);

struct SmoothnessConstants {
    double c_of_t = 0.0;        // C(t0, ...) when t0 is finite and positive, else C(0, ...)
    double t0 = 0.0;            // may be <= 0; +inf when ||b'|| = 0 and threshold_ok
    bool threshold_ok = false;  // alpha^2 + beta^2 < kSmoothThreshold
    bool t0_infinite = false;   // ||b'|| = 0: no drift restriction on the horizon
};

/// t0 = ((sqrt 2 - 1)^2 / 3 - 4 (alpha^2 + beta^2)) / ||b'||^2.
SmoothnessConstants smooth_density_horizon(double alpha, double beta, double b_prime_sup);

struct HNormBound {
    double value = 0.0;
    bool vacuous = false;  // C(t, ...) >= 1; value is then 0
};

/// Lower bound on ||D X_s||_H^2 for additive noise sigma, 0 < s <= t:
///   (1 - C(t)) sigma^2 s^2 / (2 (1 + 3 ||b'||^2 s^2 + 3 (alpha^2 + beta^2))).
HNormBound hnorm_lower_bound(double s, double t, double sigma, double alpha,
                             double beta, double b_prime_sup);

}  // namespace psde

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace psde {

using RealFn = std::function<double(double)>;

/// A scalar coefficient function with its first two derivatives and the
/// bound constants the analysis needs.
struct ScalarFunction {
    std::string description;
    RealFn value;
    RealFn first;
    RealFn second;
    double sup_abs_derivative = 0.0;  // ||f'||_inf
    double inf_abs_value = 0.0;       // inf |f|, may be 0
    double sup_abs_value = 0.0;       // ||f||_inf, +inf when unbounded
};

/// Built-in coefficient families. Every family declares exact bound constants.
namespace coefficient {

ScalarFunction constant(double c);

/// clamp(intercept + slope * x, lower, upper). Lipschitz with a kink at the
/// clip points; the derivative there is taken from the interior side.
ScalarFunction affine_clipped(double intercept, double slope, double lower, double upper);

/// offset + amplitude * sin(frequency * x + phase).
ScalarFunction sinusoidal(double offset, double amplitude, double frequency, double phase = 0.0);

/// offset + amplitude / (1 + exp(-steepness * (x - center))).
ScalarFunction logistic(double offset, double amplitude, double steepness, double center = 0.0);

/// Monotone (PCHIP) interpolation through (xs, ys), held constant outside the
/// table. Bounds are measured on the interpolant.
ScalarFunction tabulated(std::vector<double> xs, std::vector<double> ys);

/// 1 / (1 + amplitude sin(x)), |amplitude| < 1.
ScalarFunction reciprocal_sinusoid(double amplitude);

}  // namespace coefficient

/// Drift b and diffusion sigma with their derivatives and declared bounds.
struct CoefficientModel {
    std::string name;
    RealFn b;
    RealFn sigma;
    RealFn b_prime;
    RealFn sigma_prime;
    RealFn sigma_second;  // may be empty
    double lipschitz_k = 0.0;
    double b_prime_sup = 0.0;
    double sigma_prime_sup = 0.0;
    double sigma_inf = 0.0;
    double sigma_sup = 0.0;
};

CoefficientModel make_model(const ScalarFunction& drift, const ScalarFunction& diffusion,
                            std::string name = {});

/// b = 0, sigma = 1.
CoefficientModel brownian_model();

/// Additive-noise model with constant sigma.
CoefficientModel additive_model(const ScalarFunction& drift, double sigma);

struct BoundCheck {
    bool ok = true;
    std::string violation;
};

/// Spot-checks the declared bounds |b'| <= b_prime_sup, |sigma'| <=
/// sigma_prime_sup and |sigma| >= sigma_inf on `samples` equispaced points.
BoundCheck check_bounds(const CoefficientModel& model, double lo, double hi,
                        std::size_t samples = 10000, double rel_slack = 1e-9);

}  // namespace psde

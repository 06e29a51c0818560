#include "psde/coefficients.hpp"

#include "psde/error.hpp"

#include <cmath>
// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace psde {

namespace coefficient {

namespace {

std::string describe(const char* kind, std::initializer_list<double> args) {
    std::ostringstream os;
    os.precision(17);
    os << kind << '(';
    bool first = true;
    for (double a : args) {
        if (!first) os << ',';
        os << a;
        first = false;
    }
    os << ')';
    return os.str();
}

double inf_abs_over_range(double lo, double hi) {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
}

}  // namespace

ScalarFunction constant(double c) {
    ScalarFunction f;
    f.description = describe("constant", {c});
    f.value = [c](double) { return c; };
    f.first = [](double) { return 0.0; };
    f.second = [](double) { return 0.0; };
    f.sup_abs_derivative = 0.0;
    f.inf_abs_value = std::abs(c);
    f.sup_abs_value = std::abs(c);
    return f;
}

ScalarFunction affine_clipped(double intercept, double slope, double lower, double upper) {
    if (!(lower <= upper)) {
        throw NumericalError(ErrorCode::InvalidArgument, "affine_clipped needs lower <= upper");
    }
    ScalarFunction f;
    f.description = describe("affine_clipped", {intercept, slope, lower, upper});
    f.value = [=](double x) { return std::clamp(intercept + slope * x, lower, upper); };
    f.first = [=](double x) {
        const double raw = intercept + slope * x;
        return (raw < lower || raw > upper) ? 0.0 : slope;
    };
    f.second = [](double) { return 0.0; };
    f.sup_abs_derivative = std::abs(slope);
    if (slope == 0.0) {
        const double v = std::clamp(intercept, lower, upper);
        f.inf_abs_value = std::abs(v);
        f.sup_abs_value = std::abs(v);
    } else {
        f.inf_abs_value = inf_abs_over_range(lower, upper);
        f.sup_abs_value = std::max(std::abs(lower), std::abs(upper));
    }
    return f;
}

ScalarFunction sinusoidal(double offset, double amplitude, double frequency, double phase) {
    ScalarFunction f;
    f.description = describe("sinusoidal", {offset, amplitude, frequency, phase});
    f.value = [=](double x) { return offset + amplitude * std::sin(frequency * x + phase); };
    f.first = [=](double x) {
        return amplitude * frequency * std::cos(frequency * x + phase);
    };
    f.second = [=](double x) {
        return -amplitude * frequency * frequency * std::sin(frequency * x + phase);
    };
    f.sup_abs_derivative = std::abs(amplitude * frequency);
    const double a = frequency == 0.0 ? 0.0 : std::abs(amplitude);
    const double centre = frequency == 0.0 ? offset + amplitude * std::sin(phase) : offset;
    f.inf_abs_value = inf_abs_over_range(centre - a, centre + a);
    f.sup_abs_value = std::abs(centre) + a;
    return f;
}

ScalarFunction logistic(double offset, double amplitude, double steepness, double center) {
    ScalarFunction f;
    f.description = describe("logistic", {offset, amplitude, steepness, center});
    auto s = [=](double x) { return 1.0 / (1.0 + std::exp(-steepness * (x - center))); };
    f.value = [=](double x) { return offset + amplitude * s(x); };
    f.first = [=](double x) {
        const double v = s(x);
        return amplitude * steepness * v * (1.0 - v);
    };
    f.second = [=](double x) {
        const double v = s(x);
        return amplitude * steepness * steepness * v * (1.0 - v) * (1.0 - 2.0 * v);
    };
    f.sup_abs_derivative = std::abs(amplitude * steepness) / 4.0;
    const double lo = std::min(offset, offset + amplitude);
    const double hi = std::max(offset, offset + amplitude);
    f.inf_abs_value = steepness == 0.0 ? std::abs(offset + amplitude / 2.0)
                                       : inf_abs_over_range(lo, hi);
    f.sup_abs_value = std::max(std::abs(lo), std::abs(hi));
    return f;
}

ScalarFunction tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 4) {
        throw NumericalError(ErrorCode::InvalidArgument,
                             "tabulated coefficient needs at least 4 (x, y) pairs");
    }
    for (std::size_t k = 1; k < xs.size(); ++k) {
        if (!(xs[k] > xs[k - 1])) {
            throw NumericalError(ErrorCode::InvalidArgument,
                                 "tabulated coefficient abscissae must be strictly increasing");
        }
    }
    const double x_lo = xs.front();
    const double x_hi = xs.back();
    const double y_lo = ys.front();
    const double y_hi = ys.back();

    using Spline = boost::math::interpolators::pchip<std::vector<double>>;
    auto spline = std::make_shared<Spline>(std::move(xs), std::move(ys));

    ScalarFunction f;
    std::ostringstream os;
    os.precision(17);
    os << "tabulated(" << x_lo << ',' << x_hi << ')';
    f.description = os.str();
    f.value = [=](double x) {
        if (x <= x_lo) return y_lo;
        if (x >= x_hi) return y_hi;
        return (*spline)(x);
    };
    f.first = [=](double x) {
        if (x <= x_lo || x >= x_hi) return 0.0;
        return spline->prime(x);
    };
    const double h = (x_hi - x_lo) * 1e-6;
    f.second = [=](double x) {
        if (x <= x_lo || x >= x_hi) return 0.0;
        const double a = std::max(x - h, x_lo);
        const double b = std::min(x + h, x_hi);
        return (spline->prime(b) - spline->prime(a)) / (b - a);
    };

    // Bounds of a cubic Hermite piece are attained inside intervals, so sample
    // densely and pad slightly.
    constexpr std::size_t kSamples = 200001;
    double dmax = 0.0;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = 0.0;
    for (std::size_t k = 0; k < kSamples; ++k) {
        const double x = x_lo + (x_hi - x_lo) * static_cast<double>(k) / (kSamples - 1);
        dmax = std::max(dmax, std::abs(f.first(x)));
        const double v = std::abs(f.value(x));
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    f.sup_abs_derivative = dmax * (1.0 + 1e-3);
    f.inf_abs_value = vmin * (1.0 - 1e-3);
    f.sup_abs_value = vmax * (1.0 + 1e-3);
    return f;
}

ScalarFunction reciprocal_sinusoid(double amplitude) {
    if (!(std::abs(amplitude) < 1.0)) {
        throw NumericalError(ErrorCode::InvalidArgument,
                             "reciprocal_sinusoid needs |amplitude| < 1");
    }
    const double a = amplitude;
    ScalarFunction f;
    f.description = describe("reciprocal_sinusoid", {a});
    f.value = [a](double x) { return 1.0 / (1.0 + a * std::sin(x)); };
    f.first = [a](double x) {
        const double d = 1.0 + a * std::sin(x);
        return -a * std::cos(x) / (d * d);
    };
    f.second = [a](double x) {
        const double s = std::sin(x);
        const double c = std::cos(x);
        const double d = 1.0 + a * s;
        return a * s / (d * d) + 2.0 * a * a * c * c / (d * d * d);
    };
    // |f'| = |a cos| / (1 + a sin)^2 <= |a| / (1 - |a|)^2
    f.sup_abs_derivative = std::abs(a) / ((1.0 - std::abs(a)) * (1.0 - std::abs(a)));
    f.inf_abs_value = 1.0 / (1.0 + std::abs(a));
    f.sup_abs_value = 1.0 / (1.0 - std::abs(a));
    return f;
}

}  // namespace coefficient

CoefficientModel make_model(const ScalarFunction& drift, const ScalarFunction& diffusion,
                            std::string name) {
    CoefficientModel m;
    m.name = name.empty() ? "b=" + drift.description + ";sigma=" + diffusion.description
                          : std::move(name);
    m.b = drift.value;
    m.sigma = diffusion.value;
    m.b_prime = drift.first;
    m.sigma_prime = diffusion.first;
    m.sigma_second = diffusion.second;
    m.b_prime_sup = drift.sup_abs_derivative;
    m.sigma_prime_sup = diffusion.sup_abs_derivative;
    m.lipschitz_k = std::max(m.b_prime_sup, m.sigma_prime_sup);
    m.sigma_inf = diffusion.inf_abs_value;
    m.sigma_sup = diffusion.sup_abs_value;
    return m;
}

CoefficientModel brownian_model() {
    return make_model(coefficient::constant(0.0), coefficient::constant(1.0), "brownian");
}

CoefficientModel additive_model(const ScalarFunction& drift, double sigma) {
    return make_model(drift, coefficient::constant(sigma));
}

BoundCheck check_bounds(const CoefficientModel& model, double lo, double hi,
                        std::size_t samples, double rel_slack) {
    BoundCheck out;
    if (samples < 2 || !(lo < hi)) {
        throw NumericalError(ErrorCode::InvalidArgument, "check_bounds needs lo < hi, samples >= 2");
    }
    auto fail = [&](const char* what, double x, double got, double declared) {
        std::ostringstream os;
        os.precision(17);
        os << what << " at x = " << x << ": " << got << " vs declared " << declared;
        out.ok = false;
        out.violation = os.str();
    };
    for (std::size_t k = 0; k < samples && out.ok; ++k) {
        const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
        const double bp = std::abs(model.b_prime(x));
        const double sp = std::abs(model.sigma_prime(x));
        const double sv = std::abs(model.sigma(x));
        if (bp > model.b_prime_sup * (1.0 + rel_slack) + rel_slack) {
            fail("|b'|", x, bp, model.b_prime_sup);
        } else if (sp > model.sigma_prime_sup * (1.0 + rel_slack) + rel_slack) {
            fail("|sigma'|", x, sp, model.sigma_prime_sup);
        } else if (sv < model.sigma_inf * (1.0 - rel_slack)) {
            fail("|sigma|", x, sv, model.sigma_inf);
        }
    }
    return out;
}

}  // namespace psde

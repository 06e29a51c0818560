#pragma once

#include "psde/error.hpp"

#include <cmath>
#include <cstddef>

namespace psde {

struct QuadratureResult {
    double value = 0.0;
    bool converged = true;
};

namespace detail {

template <class F>
double simpson_step_mid(F& f, double a, double fa, double b, double fb, double fm, double whole,
                        double eps, int depth, bool& ok) {
    const double c = 0.5 * (a + b);
    const double fl = f(0.5 * (a + c));
    const double fr = f(0.5 * (c + b));
    const double left = (c - a) / 6.0 * (fa + 4.0 * fl + fm);
    const double right = (b - c) / 6.0 * (fm + 4.0 * fr + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        ok = false;
        return left + right + delta / 15.0;
    }
    return simpson_step_mid(f, a, fa, c, fm, fl, left, 0.5 * eps, depth - 1, ok) +
           simpson_step_mid(f, c, fm, b, fb, fr, right, 0.5 * eps, depth - 1, ok);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
    if (a == b) return {0.0, true};
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    bool ok = true;
    const double v = detail::simpson_step_mid(f, a, fa, b, fb, fm, whole, tol, max_depth, ok);
    return {v, ok && std::isfinite(v)};
}

/// adaptive_simpson that throws NumericalError(QuadratureFail) on failure.
template <class F>
double integrate(F&& f, double a, double b, double tol, int max_depth = 48) {
    const auto r = adaptive_simpson(f, a, b, tol, max_depth);
    if (!r.converged) {
        throw NumericalError(ErrorCode::QuadratureFail, "adaptive Simpson did not reach tolerance");
    }
    return r.value;
}

}  // namespace psde

#include "psde/malliavin.hpp"

#include "psde/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace psde {

DerivativeField::DerivativeField(TimeGrid grid, std::vector<std::size_t> argmax,
                                 std::vector<std::size_t> argmin)
    : grid_(grid), argmax_(std::move(argmax)), argmin_(std::move(argmin)) {
    const std::size_t n = grid_.n_steps;
    data_.assign(n * (n + 1) / 2, 0.0);
}

std::vector<std::size_t> DerivativeField::jump_locations() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < argmax_.size(); ++k) {
        if (argmax_[k] != argmax_[k - 1] || argmin_[k] != argmin_[k - 1]) out.push_back(k);
    }
    return out;
}

DerivativeField derivative_field(const Path& path, const CoefficientModel& model,
                                 const PerturbationParams& params, std::size_t max_steps) {
    const std::size_t n = path.grid.n_steps;
    if (n > max_steps) {
        std::ostringstream os;
        os << "derivative field limited to " << max_steps << " steps (path has " << n << ")";
        throw NumericalError(ErrorCode::InvalidArgument, os.str());
    }
    if (path.argmax.size() != n + 1 || path.argmin.size() != n + 1 || path.dw.size() != n) {
        throw NumericalError(ErrorCode::InvalidArgument, "path lacks argmax/argmin tracking");
    }
    const double alpha = params.alpha;
    const double beta = params.beta;
    const double dt = path.grid.dt();

    // Linearised one-step multiplier sigma'(x_i) dW_i + b'(x_i) dt.
    std::vector<double> gain(n);
    std::vector<double> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
        gain[i] = model.sigma_prime(path.x[i]) * path.dw[i] + model.b_prime(path.x[i]) * dt;
        sig[i] = model.sigma(path.x[i]);
    }

    DerivativeField field(path.grid, path.argmax, path.argmin);
    for (std::size_t j = 1; j <= n; ++j) {
        auto row = field.row(j);  // row[k - j]
        double acc = sig[j - 1];
        for (std::size_t k = j; k <= n; ++k) {
            const std::size_t am = path.argmax[k];
            const std::size_t an = path.argmin[k];
            double raw = acc;
            double divisor = 1.0;
            if (am == k) {
                divisor -= alpha;
            } else if (am >= j) {
                raw += alpha * row[am - j];
            }
            if (an == k) {
                divisor -= beta;
            } else if (an >= j) {
                raw += beta * row[an - j];
            }
            const double d = raw / divisor;
            row[k - j] = d;
            if (k < n) acc += gain[k] * d;
        }
        if (!std::isfinite(acc)) {
            std::ostringstream os;
            os << "non-finite derivative in row " << j;
            throw NumericalError(ErrorCode::NonFinite, os.str());
        }
    }
    return field;
}

HNorm h_norm(const DerivativeField& field, std::size_t k) {
    if (k > field.n_steps()) {
        throw NumericalError(ErrorCode::InvalidArgument, "h_norm index outside the grid");
    }
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
        const double d = field(j, k);
        s += d * d;
    }
    return {k, s * field.grid().dt()};
}

std::vector<double> h_norm_profile(const DerivativeField& field) {
    const std::size_t n = field.n_steps();
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        const auto row = field.row(j);
        for (std::size_t k = j; k <= n; ++k) out[k] += row[k - j] * row[k - j];
    }
    const double dt = field.grid().dt();
    for (auto& v : out) v *= dt;
    return out;
}

double directional_derivative(const DerivativeField& field, double r_lo, double r_hi) {
    const std::size_t n = field.n_steps();
    const auto& grid = field.grid();
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double t = grid.time(j);
        if (t > r_lo && t <= r_hi) s += field(j, n);
    }
    return s * grid.dt();
}

DirectionalEstimate cameron_martin_directional(const CoefficientModel& model,
                                               const PerturbationParams& params,
                                               const SimConfig& cfg, std::span<const double> dw,
                                               double r_lo, double r_hi, double eps) {
    if (!(0.0 <= r_lo && r_lo < r_hi && r_hi <= cfg.horizon) || !(eps > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument,
                             "cameron_martin_directional needs 0 <= r_lo < r_hi <= T, eps > 0");
    }
    const auto base = simulate_per_step(model, params, cfg, dw);
    std::vector<double> shifted(dw.begin(), dw.end());
    const auto grid = cfg.grid();
    const double dt = grid.dt();
    for (std::size_t j = 1; j <= cfg.n_steps; ++j) {
        const double t = grid.time(j);
        if (t > r_lo && t <= r_hi) shifted[j - 1] += eps * dt;
    }
    const auto bumped = simulate_per_step(model, params, cfg, shifted);
    const double xt = base.terminal();
    const double diff = bumped.terminal() - xt;
    const double roundoff =
        std::numeric_limits<double>::epsilon() * std::max(std::abs(xt), std::numeric_limits<double>::min());
    return {diff / eps, std::abs(diff) < 10.0 * roundoff};
}

DirectionalEstimate cameron_martin_directional(const CoefficientModel& model,
                                               const PerturbationParams& params,
                                               const SimConfig& cfg, double r_lo, double r_hi,
                                               double eps) {
    const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, cfg.seed);
    return cameron_martin_directional(model, params, cfg, dw, r_lo, r_hi, eps);
}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

PositivityReport positivity_report(std::span<const double> h_norms, double t, double threshold,
                                   double sigma_inf) {
    PositivityReport r;
    r.n_paths = h_norms.size();
    r.t = t;
    r.threshold = threshold;
    r.hypothesis_ok = sigma_inf > 0.0;
    if (h_norms.empty()) return r;
    std::vector<double> v(h_norms.begin(), h_norms.end());
    std::sort(v.begin(), v.end());
    r.min = v.front();
    r.max = v.back();
    r.q05 = quantile_sorted(v, 0.05);
    r.median = quantile_sorted(v, 0.5);
    r.q95 = quantile_sorted(v, 0.95);
    const auto below = std::upper_bound(v.begin(), v.end(), threshold) - v.begin();
    r.fraction_at_or_below = static_cast<double>(below) / static_cast<double>(v.size());
    r.all_positive = r.min > 0.0;
    return r;
}

PositivityReport positivity_report(std::span<const DerivativeField> fields, double t,
                                   double threshold, double sigma_inf) {
    std::vector<double> values;
    values.reserve(fields.size());
    for (const auto& f : fields) {
        const double dt = f.grid().dt();
        const auto k = static_cast<std::size_t>(std::llround(t / dt));
        values.push_back(h_norm(f, std::min(k, f.n_steps())).value);
    }
    return positivity_report(values, t, threshold, sigma_inf);
}

void write_field_csv(std::ostream& os, const DerivativeField& field) {
    os << "j,k,d\r\n";
    const std::size_t n = field.n_steps();
    for (std::size_t j = 1; j <= n; ++j) {
        const auto row = field.row(j);
        for (std::size_t k = j; k <= n; ++k) {
            os << j << ',' << k << ',' << format_double(row[k - j]) << "\r\n";
        }
    }
}

}  // namespace psde

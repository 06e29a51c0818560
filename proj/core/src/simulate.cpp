#include "psde/simulate.hpp"

#include "psde/error.hpp"
#include "psde/rng.hpp"
#include "psde/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace psde {

const char* to_string(Scheme s) noexcept {
    return s == Scheme::PerStep ? "per_step" : "picard";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> brownian_driver(std::size_t n_steps, double horizon, std::uint64_t seed) {
    if (n_steps < 1 || !(horizon > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument, "brownian_driver needs n_steps >= 1, horizon > 0");
    }
    const double sd = std::sqrt(horizon / static_cast<double>(n_steps));
    NormalSource normal(seed);
    std::vector<double> dw(n_steps);
    for (auto& v : dw) v = sd * normal();
    return dw;
}

std::vector<double> coarsen_increments(std::span<const double> dw, std::size_t factor) {
    if (factor < 1 || dw.size() % factor != 0) {
        throw NumericalError(ErrorCode::InvalidArgument,
                             "coarsening factor must divide the number of increments");
    }
    std::vector<double> out(dw.size() / factor, 0.0);
    for (std::size_t k = 0; k < dw.size(); ++k) out[k / factor] += dw[k];
    return out;
}

namespace {

void check_config(const SimConfig& cfg, std::span<const double> dw) {
    if (!(cfg.horizon > 0.0) || cfg.n_steps < 1) {
        throw NumericalError(ErrorCode::InvalidArgument, "SimConfig needs horizon > 0 and n_steps >= 1");
    }
    if (dw.size() != cfg.n_steps) {
        throw NumericalError(ErrorCode::InvalidArgument, "driver length differs from n_steps");
    }
}

void fill_brownian(Path& path, std::span<const double> dw) {
    path.dw.assign(dw.begin(), dw.end());
    path.w.resize(dw.size() + 1);
    path.w[0] = 0.0;
    for (std::size_t k = 0; k < dw.size(); ++k) path.w[k + 1] = path.w[k] + dw[k];
}

void fill_extremes_from_x(Path& path) {
    const std::size_t n = path.x.size();
    path.argmax.resize(n);
    path.argmin.resize(n);
    std::size_t amax = 0;
    std::size_t amin = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (path.x[k] > path.x[amax]) amax = k;
        if (path.x[k] < path.x[amin]) amin = k;
        path.argmax[k] = amax;
        path.argmin[k] = amin;
    }
}

[[noreturn]] void non_finite(std::size_t k, const char* what) {
    std::ostringstream os;
    os << "non-finite " << what << " at step " << k;
    throw NumericalError(ErrorCode::NonFinite, os.str());
}

}  // namespace

Path simulate_per_step(const CoefficientModel& model, const PerturbationParams& params,
                       const SimConfig& cfg, std::span<const double> dw) {
    check_config(cfg, dw);
    const double alpha = params.alpha;
    const double beta = params.beta;
    const double dt = cfg.grid().dt();
    const std::size_t n = cfg.n_steps;

    Path path;
    path.grid = cfg.grid();
    fill_brownian(path, dw);
    path.x.resize(n + 1);
    path.m.resize(n + 1);
    path.i.resize(n + 1);
    path.argmax.resize(n + 1);
    path.argmin.resize(n + 1);

    // Both extremes move at t = 0, hence the 1 - alpha - beta divisor.
    const double x0 = cfg.x / params.unperturbed_divisor();
    path.x[0] = path.m[0] = path.i[0] = x0;
    path.argmax[0] = path.argmin[0] = 0;

    for (std::size_t k = 0; k < n; ++k) {
        const double xk = path.x[k];
        const double mk = path.m[k];
        const double ik = path.i[k];
        const double sx = model.sigma(xk);
        const double bx = model.b(xk);
        if (!std::isfinite(sx) || !std::isfinite(bx)) non_finite(k, "coefficient");
        const double u = xk + sx * dw[k] + bx * dt;
        if (!std::isfinite(u)) non_finite(k, "state");

        double next = u;
        double m_next = mk;
        double i_next = ik;
        std::size_t amax = path.argmax[k];
        std::size_t amin = path.argmin[k];
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                             std::max({std::abs(u), std::abs(mk), std::abs(ik), 1.0});
        if (u > mk) {
            next = (u - alpha * mk) / (1.0 - alpha);
            if (next > mk) {
                m_next = next;
                amax = k + 1;
            } else if (next >= mk - slack) {
                next = mk;  // rounding tie: no update
            } else {
                throw NumericalError(ErrorCode::CaseInconsistent, "new-max case solved below the max");
            }
        } else if (u < ik) {
            next = (u - beta * ik) / (1.0 - beta);
            if (next < ik) {
                i_next = next;
                amin = k + 1;
            } else if (next <= ik + slack) {
                next = ik;
            } else {
                throw NumericalError(ErrorCode::CaseInconsistent, "new-min case solved above the min");
            }
        }
        if (!std::isfinite(next)) non_finite(k + 1, "state");
        path.x[k + 1] = next;
        path.m[k + 1] = m_next;
        path.i[k + 1] = i_next;
        path.argmax[k + 1] = amax;
        path.argmin[k + 1] = amin;
    }
    return path;
}

Path simulate_per_step(const CoefficientModel& model, const PerturbationParams& params,
                       const SimConfig& cfg) {
    const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, cfg.seed);
    return simulate_per_step(model, params, cfg, dw);
}

PicardResult simulate_picard(const CoefficientModel& model, const PerturbationParams& params,
                             const SimConfig& cfg, std::span<const double> dw) {
    check_config(cfg, dw);
    if (cfg.picard_outer_iters < 1 || !(cfg.fixed_point_tol > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument,
                             "Picard scheme needs picard_outer_iters >= 1, fixed_point_tol > 0");
    }
    const std::size_t n = cfg.n_steps;
    const double dt = cfg.grid().dt();

    std::vector<double> xs(n + 1, cfg.x / (1.0 - params.alpha));
    std::vector<double> a(n + 1);
    SkorokhodOptions inner;
    inner.tol = std::min(1e-12, cfg.fixed_point_tol * 1e-2);

    PicardResult result;
    for (std::size_t map = 1; map <= cfg.picard_outer_iters + 1; ++map) {
        a[0] = cfg.x;
        for (std::size_t k = 0; k < n; ++k) {
            a[k + 1] = a[k] + model.sigma(xs[k]) * dw[k] + model.b(xs[k]) * dt;
        }
        if (!std::isfinite(a[n])) non_finite(n, "driving path");
        auto sol = solve_max_min(a, params, inner);
        auto next = sol.perturbed_path(a, params);

        double change = 0.0;
        for (std::size_t k = 0; k <= n; ++k) change = std::max(change, std::abs(next[k] - xs[k]));
        result.change_history.push_back(change);
        xs.swap(next);

        if (change <= cfg.fixed_point_tol) {
            result.outer_iterations = map - 1;
            Path& path = result.path;
            path.grid = cfg.grid();
            fill_brownian(path, dw);
            path.x = std::move(xs);
            path.m = std::move(sol.m_path);
            path.i = std::move(sol.i_path);
            fill_extremes_from_x(path);
            return result;
        }
    }
    std::ostringstream os;
    os << "outer Picard iteration did not reach tol " << cfg.fixed_point_tol << " in "
       << cfg.picard_outer_iters << " iterations";
    throw NumericalError(ErrorCode::NoConvergence, os.str(), result.change_history);
}

PicardResult simulate_picard(const CoefficientModel& model, const PerturbationParams& params,
                             const SimConfig& cfg) {
    const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, cfg.seed);
    return simulate_picard(model, params, cfg, dw);
}

Path simulate(const CoefficientModel& model, const PerturbationParams& params,
              const SimConfig& cfg, std::span<const double> dw) {
    if (cfg.scheme == Scheme::Picard) {
        return simulate_picard(model, params, cfg, dw).path;
    }
    return simulate_per_step(model, params, cfg, dw);
}

Path simulate(const CoefficientModel& model, const PerturbationParams& params,
              const SimConfig& cfg) {
    const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, cfg.seed);
    return simulate(model, params, cfg, dw);
}

double dynamics_residual(const Path& path, const CoefficientModel& model,
                         const PerturbationParams& params) {
    const double dt = path.grid.dt();
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < path.x.size(); ++k) {
        const double xk = path.x[k];
        const double r = path.x[k + 1] - xk - model.sigma(xk) * path.dw[k] - model.b(xk) * dt -
                         params.alpha * (path.m[k + 1] - path.m[k]) -
                         params.beta * (path.i[k + 1] - path.i[k]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

void write_path_csv(std::ostream& os, const Path& path) {
    os << "t,x,m,i,w\r\n";
    for (std::size_t k = 0; k < path.x.size(); ++k) {
        os << format_double(path.grid.time(k)) << ',' << format_double(path.x[k]) << ','
           << format_double(path.m[k]) << ',' << format_double(path.i[k]) << ','
           << format_double(path.w[k]) << "\r\n";
    }
}

}  // namespace psde

#include "psde/skorokhod.hpp"

#include "psde/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace psde {

namespace {

double sup_diff(std::span<const double> u, std::span<const double> v) {
    double d = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        d = std::max(d, std::abs(u[k] - v[k]));
    }
    return d;
}

// I_k = min_{j<=k} (a_j + alpha M_j) / (1 - beta); I_0 = x0 exactly.
void update_min(std::span<const double> a, std::span<const double> m, double alpha, double beta,
                double x0, std::span<double> i_out) {
    double run = x0 * (1.0 - beta);
    const double inv = 1.0 / (1.0 - beta);
    i_out[0] = x0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        run = std::min(run, a[k] + alpha * m[k]);
        i_out[k] = run * inv;
    }
}

// M_k = max_{j<=k} (a_j + beta I_j) / (1 - alpha); M_0 = x0 exactly.
void update_max(std::span<const double> a, std::span<const double> i, double alpha, double beta,
                double x0, std::span<double> m_out) {
    double run = x0 * (1.0 - alpha);
    const double inv = 1.0 / (1.0 - alpha);
    m_out[0] = x0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        run = std::max(run, a[k] + beta * i[k]);
        m_out[k] = run * inv;
    }
}

void check_input(std::span<const double> a) {
    if (a.empty()) {
        throw NumericalError(ErrorCode::InvalidArgument, "driving path is empty");
    }
    for (double v : a) {
        if (!std::isfinite(v)) {
            throw NumericalError(ErrorCode::NonFinite, "driving path has a non-finite value");
        }
    }
}

}  // namespace

std::vector<double> MaxMinSolution::perturbed_path(std::span<const double> a,
                                                   const PerturbationParams& params) const {
    std::vector<double> x(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        x[k] = a[k] + params.alpha * m_path[k] + params.beta * i_path[k];
    }
    return x;
}

MaxMinSolution solve_max_min(std::span<const double> a, const PerturbationParams& params,
                             const SkorokhodOptions& options) {
    check_input(a);
    if (!(options.tol > 0.0) || options.max_iter < 1) {
        throw NumericalError(ErrorCode::InvalidArgument, "solve_max_min needs tol > 0, max_iter >= 1");
    }
    const std::size_t n = a.size();
    const double alpha = params.alpha;
    const double beta = params.beta;

    const double x0 = a[0] / (1.0 - alpha - beta);

    MaxMinSolution sol;
    if (options.warm_start) {
        if (options.warm_start->size() != n) {
            throw NumericalError(ErrorCode::InvalidArgument, "warm start has the wrong length");
        }
        sol.m_path = *options.warm_start;
    } else {
        sol.m_path.assign(n, x0);
    }
    sol.i_path.resize(n);
    update_min(a, sol.m_path, alpha, beta, x0, sol.i_path);

    std::vector<double> m_next(n);
    std::vector<double> i_next(n);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        update_max(a, sol.i_path, alpha, beta, x0, m_next);
        update_min(a, m_next, alpha, beta, x0, i_next);
        const double r = std::max(sup_diff(m_next, sol.m_path), sup_diff(i_next, sol.i_path));
        sol.m_path.swap(m_next);
        sol.i_path.swap(i_next);
        sol.iterations = it;
        sol.residual = r;
        sol.residual_history.push_back(r);
        if (r <= options.tol) {
            return sol;
        }
    }
    std::ostringstream os;
    os << "Skorokhod fixed point: residual " << sol.residual << " > tol " << options.tol
       << " after " << options.max_iter << " sweeps";
    throw NumericalError(ErrorCode::NoConvergence, os.str(), sol.residual_history);
}

std::vector<double> contraction_rate(std::span<const double> a, const PerturbationParams& params,
                                     std::size_t n_sweeps) {
    check_input(a);
    std::vector<double> ratios;
    if (params.alpha * params.beta == 0.0) {
        return ratios;
    }
    const std::size_t n = a.size();
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    // Below this the step is dominated by rounding and ratios are meaningless.
    const double noise = 1e-11 * std::max(scale, 1.0);

    const double x0 = a[0] / (1.0 - params.alpha - params.beta);
    std::vector<double> m_prev(n, x0);
    std::vector<double> i_tmp(n);
    std::vector<double> m_cur(n);
    update_min(a, m_prev, params.alpha, params.beta, x0, i_tmp);
    update_max(a, i_tmp, params.alpha, params.beta, x0, m_cur);
    double prev_step = sup_diff(m_cur, m_prev);

    std::vector<double> m_next(n);
    for (std::size_t s = 0; s < n_sweeps; ++s) {
        update_min(a, m_cur, params.alpha, params.beta, x0, i_tmp);
        update_max(a, i_tmp, params.alpha, params.beta, x0, m_next);
        const double step = sup_diff(m_next, m_cur);
        if (prev_step <= noise) {
            break;
        }
        ratios.push_back(step / prev_step);
        prev_step = step;
        m_cur.swap(m_next);
    }
    return ratios;
}

void running_max(std::span<const double> x, std::span<double> out) {
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) {
        run = std::max(run, x[k]);
        out[k] = run;
    }
}

void running_min(std::span<const double> x, std::span<double> out) {
    double run = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) {
        run = std::min(run, x[k]);
        out[k] = run;
    }
}

}  // namespace psde

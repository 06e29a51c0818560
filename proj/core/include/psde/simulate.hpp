#pragma once

#include "psde/coefficients.hpp"
#include "psde/params.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace psde {

/// Uniform grid t_k = k * horizon / n_steps, k = 0..n_steps.
struct TimeGrid {
    double horizon = 1.0;
    std::size_t n_steps = 1;

    double dt() const noexcept { return horizon / static_cast<double>(n_steps); }
    double time(std::size_t k) const noexcept {
        return horizon * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    std::size_t size() const noexcept { return n_steps + 1; }
};

enum class Scheme { PerStep, Picard };

const char* to_string(Scheme s) noexcept;

struct SimConfig {
    double x = 0.0;  // the constant x of the equation; X_0 = x / (1 - alpha - beta)
    double horizon = 1.0;
    std::size_t n_steps = 1000;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::PerStep;
    std::size_t picard_outer_iters = 50;
    double fixed_point_tol = 1e-10;

    TimeGrid grid() const { return {horizon, n_steps}; }
};

/// A simulated path. m / i are the running max / min of x, argmax / argmin
/// the earliest index attaining them, dw the Brownian increments used and w
/// their cumulative sums (w[0] = 0).
struct Path {
    TimeGrid grid;
    std::vector<double> x;
    std::vector<double> m;
    std::vector<double> i;
    std::vector<double> w;
    std::vector<double> dw;
    std::vector<std::size_t> argmax;
    std::vector<std::size_t> argmin;

    double terminal() const { return x.back(); }
};

/// n_steps i.i.d. N(0, horizon / n_steps) increments, reproducible per seed.
std::vector<double> brownian_driver(std::size_t n_steps, double horizon, std::uint64_t seed);

/// Sums consecutive groups of `factor` increments (coarser grid, same path).
std::vector<double> coarsen_increments(std::span<const double> dw, std::size_t factor);

/// Semi-implicit per-step scheme: the Euler candidate
///   u = x_k + sigma(x_k) dW_k + b(x_k) dt
/// is accepted if it stays within [i_k, m_k]; otherwise the new extreme is
/// solved for, dividing by (1 - alpha) or (1 - beta).
Path simulate_per_step(const CoefficientModel& model, const PerturbationParams& params,
                       const SimConfig& cfg, std::span<const double> dw);
Path simulate_per_step(const CoefficientModel& model, const PerturbationParams& params,
                       const SimConfig& cfg);

struct PicardResult {
    Path path;
    std::size_t outer_iterations = 0;  // maps applied before the fixed point repeated
    std::vector<double> change_history;
};

/// Outer Picard iteration X^0 = x / (1 - alpha),
///   a^n_k = x + sum_{i<k} sigma(X^n_i) dW_i + b(X^n_i) dt,
///   (M, I) = solve_max_min(a^n),  X^{n+1} = a^n + alpha M + beta I,
/// until the sup-norm change is <= fixed_point_tol. At most
/// picard_outer_iters + 1 maps are applied.
PicardResult simulate_picard(const CoefficientModel& model, const PerturbationParams& params,
                             const SimConfig& cfg, std::span<const double> dw);
PicardResult simulate_picard(const CoefficientModel& model, const PerturbationParams& params,
                             const SimConfig& cfg);

/// Dispatches on cfg.scheme.
Path simulate(const CoefficientModel& model, const PerturbationParams& params,
              const SimConfig& cfg);
Path simulate(const CoefficientModel& model, const PerturbationParams& params,
              const SimConfig& cfg, std::span<const double> dw);

/// Largest |x[k+1] - x[k] - sigma dW - b dt - alpha dm - beta di| over the path.
double dynamics_residual(const Path& path, const CoefficientModel& model,
                         const PerturbationParams& params);

/// CSV with header "t,x,m,i,w" and 17 significant digits.
void write_path_csv(std::ostream& os, const Path& path);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace psde

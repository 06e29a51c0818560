#pragma once

#include "psde/params.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace psde {

/// Running extremes (M, I) of the perturbed path x = a + alpha M + beta I
/// driven by a discrete path a, i.e. the solution of
///   (1 - alpha) M_k = max_{j<=k} (a_j + beta I_j)
///   (beta - 1)  I_k = max_{j<=k} (-a_j - alpha M_j).
struct MaxMinSolution {
    std::vector<double> m_path;
    std::vector<double> i_path;
    std::size_t iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;

    /// a + alpha M + beta I.
    std::vector<double> perturbed_path(std::span<const double> a,
                                       const PerturbationParams& params) const;
};

struct SkorokhodOptions {
    double tol = 1e-12;
    std::size_t max_iter = 200;
    /// Initial M iterate. Empty means the constant a_0.
    std::optional<std::vector<double>> warm_start;
};

/// Gauss-Seidel Picard sweeps: each sweep recomputes M from the current M
/// (through the inner I it induces), then I from the new M. The residual is
/// the sup-norm change of (M, I) over one sweep.
///
/// Throws NumericalError(NoConvergence) with the residual history when the
/// residual is still above `tol` after `max_iter` sweeps.
MaxMinSolution solve_max_min(std::span<const double> a, const PerturbationParams& params,
                             const SkorokhodOptions& options = {});

/// Ratios ||M^(m+1) - M^(m)|| / ||M^(m) - M^(m-1)|| of the plain M-iteration
/// started from M^(0) = a_0. Ratios whose denominator is at round-off level
/// are dropped. Empty when alpha * beta = 0 (the first sweep is exact).
std::vector<double> contraction_rate(std::span<const double> a, const PerturbationParams& params,
                                     std::size_t n_sweeps);

/// Running max / min with earliest-index tie breaking.
void running_max(std::span<const double> x, std::span<double> out);
void running_min(std::span<const double> x, std::span<double> out);

}  // namespace psde

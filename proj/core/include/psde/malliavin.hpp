#pragma once

#include "psde/coefficients.hpp"
#include "psde/params.hpp"
#include "psde/simulate.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace psde {

/// Discrete Malliavin derivative d[j][k] = D_{t_j} X_{t_k}, 1 <= j <= k <= n.
///
/// Entry (j, k) is the sensitivity of x_k to the Brownian increment on
/// (t_{j-1}, t_j]. The derivative of the running max (min) at step k is
/// localised at argmax[k] (argmin[k]); it vanishes when that index precedes j.
class DerivativeField {
public:
    DerivativeField() = default;
    DerivativeField(TimeGrid grid, std::vector<std::size_t> argmax, std::vector<std::size_t> argmin);

    std::size_t n_steps() const noexcept { return grid_.n_steps; }
    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<std::size_t>& argmax() const noexcept { return argmax_; }
    const std::vector<std::size_t>& argmin() const noexcept { return argmin_; }

    /// Grid indices k >= 1 where argmax or argmin changes, i.e. where the
    /// localisation point of the extremum derivative jumps.
    std::vector<std::size_t> jump_locations() const;

    double operator()(std::size_t j, std::size_t k) const { return data_[offset(j) + (k - j)]; }
    double& at(std::size_t j, std::size_t k) { return data_[offset(j) + (k - j)]; }

    /// Row j as a span over k = j..n.
    std::span<const double> row(std::size_t j) const {
        return {data_.data() + offset(j), grid_.n_steps - j + 1};
    }
    std::span<double> row(std::size_t j) {
        return {data_.data() + offset(j), grid_.n_steps - j + 1};
    }

private:
    std::size_t offset(std::size_t j) const noexcept {
        const std::size_t n = grid_.n_steps;
        return (j - 1) * (n + 1) - (j - 1) * j / 2;
    }

    TimeGrid grid_;
    std::vector<std::size_t> argmax_;
    std::vector<std::size_t> argmin_;
    std::vector<double> data_;
};

/// Forward recursion per row j:
///   raw_k = sigma(x_{j-1}) + sum_{i=j}^{k-1} (sigma'(x_i) dW_i + b'(x_i) dt) d[j][i]
///           + alpha d[j][argmax_k] + beta d[j][argmin_k],
/// with self-referencing extremes (argmax_k = k and/or argmin_k = k) moved
/// to the left, giving divisors 1, 1-alpha, 1-beta or 1-alpha-beta.
///
/// O(n^2) time and memory; refuses n_steps > max_steps.
DerivativeField derivative_field(const Path& path, const CoefficientModel& model,
                                 const PerturbationParams& params, std::size_t max_steps = 4096);

struct HNorm {
    std::size_t t_index = 0;
    double value = 0.0;
};

/// sum_{j<=k} d[j][k]^2 dt.
HNorm h_norm(const DerivativeField& field, std::size_t k);

/// h_norm for every k = 0..n (entry 0 is 0).
std::vector<double> h_norm_profile(const DerivativeField& field);

/// sum over t_j in (r_lo, r_hi] of d[j][n] dt: the pairing <D X_T, 1_(r_lo, r_hi]>.
double directional_derivative(const DerivativeField& field, double r_lo, double r_hi);

struct DirectionalEstimate {
    double value = 0.0;
    bool eps_too_small = false;
};

/// Finite-difference Cameron-Martin oracle: re-simulates (per-step scheme)
/// with the increments on (r_lo, r_hi] shifted by eps * dt and returns
/// (X^eps_T - X_T) / eps. Independent of derivative_field.
DirectionalEstimate cameron_martin_directional(const CoefficientModel& model,
                                               const PerturbationParams& params,
                                               const SimConfig& cfg, std::span<const double> dw,
                                               double r_lo, double r_hi, double eps = 1e-4);
DirectionalEstimate cameron_martin_directional(const CoefficientModel& model,
                                               const PerturbationParams& params,
                                               const SimConfig& cfg, double r_lo, double r_hi,
                                               double eps = 1e-4);

struct PositivityReport {
    std::size_t n_paths = 0;
    double t = 0.0;
    double min = 0.0;
    double q05 = 0.0;
    double median = 0.0;
    double q95 = 0.0;
    double max = 0.0;
    double threshold = 0.0;
    double fraction_at_or_below = 0.0;
    bool hypothesis_ok = true;  // sigma bounded away from zero
    bool all_positive = false;
};

PositivityReport positivity_report(std::span<const double> h_norms, double t, double threshold,
                                   double sigma_inf);
PositivityReport positivity_report(std::span<const DerivativeField> fields, double t,
                                   double threshold, double sigma_inf);

/// CSV triples "j,k,d".
void write_field_csv(std::ostream& os, const DerivativeField& field);

}  // namespace psde

#pragma once

#include "psde/coefficients.hpp"
#include "psde/params.hpp"
#include "psde/simulate.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

namespace psde {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// G(y) = int_x^y du / sigma(u), its inverse, and the reduced drift
///   b~(z) = b(G^-1 z) / sigma(G^-1 z) - sigma'(G^-1 z) / 2.
///
/// G is tabulated on a node grid (composite adaptive Simpson per cell,
/// anchor x inserted as a node) and interpolated by cubic Hermite pieces
/// using the exact slopes 1 / sigma. Queries outside the table extend by
/// one-sided quadrature. Immutable once built; safe to share across threads.
class Transform {
public:
    double anchor() const noexcept { return anchor_; }
    Interval range() const noexcept { return {nodes_.front(), nodes_.back()}; }

    double g(double y) const;
    double g_prime(double y) const;
    double g_inv(double z) const;
    double b_tilde(double z) const;
    double b_tilde_prime(double z) const;

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Additive-noise model (drift b~, sigma = 1) with b~' bound measured on
    /// the tabulated range.
    CoefficientModel reduced_model() const;

    void write_csv(std::ostream& os) const;

private:
    friend Transform build_transform(const CoefficientModel&, double, Interval, std::size_t);
    struct Spline;

    CoefficientModel model_;
    double anchor_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::shared_ptr<const Spline> spline_;
};

/// Throws NumericalError(SigmaNotPositive) when sigma <= 0 at any node, and
/// InvalidArgument for an empty range. The range is widened to contain x.
Transform build_transform(const CoefficientModel& model, double x, Interval range,
                          std::size_t n_nodes = 4096);

struct ReductionLevel {
    std::size_t n_steps = 0;
    double dt = 0.0;
    double sup_discrepancy = 0.0;  // sup_k |G(x_k) - y_k|
    bool commutation_exact = true; // running max/min of G(x) == G(running max/min x)
};

struct ReductionReport {
    std::vector<ReductionLevel> levels;  // coarse to fine
    Interval range;
    double y_start = 0.0;                // the constant x of the reduced equation
    bool sigma_negated = false;
    bool monotone_decrease() const;
    bool commutation_exact() const;
};

/// Simulates X (per-step, multiplicative noise) and Y (per-step, additive
/// noise with drift b~) on the same Brownian path at cfg.n_steps * factor^l
/// steps, l = 0..refinements, and reports sup_k |G(x_k) - y_k| per level.
///
/// Y starts from (1 - alpha - beta) G(x / (1 - alpha - beta)), so that
/// Y_0 = G(X_0). A diffusion coefficient that is negative everywhere is
/// handled by negating sigma and the driver.
ReductionReport pathwise_reduction_check(const CoefficientModel& model,
                                         const PerturbationParams& params, const SimConfig& cfg,
                                         std::size_t refinements = 3, std::size_t factor = 2);

}  // namespace psde

#pragma once

#include "psde/coefficients.hpp"
#include "psde/params.hpp"
#include "psde/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psde {

struct Ensemble {
    std::vector<double> terminal_values;
    std::size_t n_paths = 0;
    double t = 0.0;
    std::uint64_t config_fingerprint = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

/// Hash of the model name, parameters and every SimConfig field.
std::uint64_t config_fingerprint(const CoefficientModel& model, const PerturbationParams& params,
                                 const SimConfig& cfg);

/// n_paths terminal values at cfg.horizon. Path p uses the driver seeded by
/// stream_seed(cfg.seed, p), so the ensemble does not depend on `threads`.
/// A failing path aborts with its index in the message.
Ensemble generate_ensemble(const CoefficientModel& model, const PerturbationParams& params,
                           const SimConfig& cfg, std::size_t n_paths, std::size_t threads = 0);

enum class LawKind { Gaussian, SinglyPerturbedBM };

struct ReferenceLaw {
    LawKind kind = LawKind::Gaussian;
    std::function<double(double)> density;
    std::function<double(double)> cdf;
};

ReferenceLaw gaussian_law(double mean, double variance);

/// Law of X_t = W_t + c max_{s<=t} W_s, c = alpha / (1 - alpha): the beta = 0,
/// b = 0, sigma = 1, x = 0 solution. The density at v is the 1-D quadrature of
/// the joint (W_t, max W_t) density along w + c m = v; the cdf is tabulated
/// by cell-wise quadrature of the density and Hermite-interpolated.
/// Throws NumericalError(QuadratureFail) when tolerance 1e-8 is unreachable.
ReferenceLaw reference_singly_perturbed(double alpha, double t);

struct AtomScan {
    double max_mass = 0.0;
    double location = 0.0;  // centre of the heaviest bin
    double bin_width = 0.0;
};

/// Bins anchored at 0: bin index floor(v / bin_width).
AtomScan atom_scan(const Ensemble& e, double bin_width);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y);

struct KdeGrid {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;
};

/// 1.06 * stddev * n^(-1/5).
double silverman_bandwidth(std::span<const double> values);

/// Gaussian-kernel estimate on `grid_points` equispaced points over
/// [min - 4h, max + 4h] (or `range` when given). nullopt bandwidth = AUTO.
KdeGrid kde(const Ensemble& e, std::optional<double> bandwidth = std::nullopt,
            std::size_t grid_points = 512, std::optional<std::pair<double, double>> range = {});

/// Trapezoid integral of the estimate over its grid.
double kde_mass(const KdeGrid& k);

struct KsResult {
    double statistic = 0.0;
    double critical_1pct = 0.0;  // 1.63 / sqrt(n)
    double critical_5pct = 0.0;  // 1.36 / sqrt(n)
    bool pass_1pct = false;
    bool pass_5pct = false;
    bool low_power = false;      // n < 35: asymptotic critical values unreliable
};

KsResult ks_test(const Ensemble& e, const ReferenceLaw& law);

void write_ensemble_csv(std::ostream& os, const Ensemble& e);
void write_kde_csv(std::ostream& os, const KdeGrid& k);

}  // namespace psde

#include "psde/density.hpp"

#include "psde/error.hpp"
#include "psde/parallel.hpp"
#include "psde/quadrature.hpp"
#include "psde/rng.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace psde {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_fingerprint(const CoefficientModel& model, const PerturbationParams& params,
                                 const SimConfig& cfg) {
    std::ostringstream os;
    os << model.name << '|' << format_double(params.alpha) << '|' << format_double(params.beta)
       << '|' << format_double(cfg.x) << '|' << format_double(cfg.horizon) << '|' << cfg.n_steps
       << '|' << cfg.seed << '|' << to_string(cfg.scheme) << '|' << cfg.picard_outer_iters << '|'
       << format_double(cfg.fixed_point_tol);
    return fnv1a(os.str());
}

Ensemble generate_ensemble(const CoefficientModel& model, const PerturbationParams& params,
                           const SimConfig& cfg, std::size_t n_paths, std::size_t threads) {
    Ensemble e;
    e.n_paths = n_paths;
    e.t = cfg.horizon;
    e.config_fingerprint = config_fingerprint(model, params, cfg);
    e.terminal_values.resize(n_paths);
    if (threads == 0) threads = default_thread_count();
    parallel_for(n_paths, threads, [&](std::size_t p) {
        const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, stream_seed(cfg.seed, p));
        try {
            e.terminal_values[p] = simulate(model, params, cfg, dw).terminal();
        } catch (const NumericalError& err) {
            std::ostringstream os;
            os << "path " << p << ": " << err.what();
            throw NumericalError(err.code(), os.str(), err.history());
        }
    });
    return e;
}

ReferenceLaw gaussian_law(double mean, double variance) {
    if (!(variance > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument, "gaussian_law needs variance > 0");
    }
    const double sd = std::sqrt(variance);
    ReferenceLaw law;
    law.kind = LawKind::Gaussian;
    law.density = [=](double v) {
        const double z = (v - mean) / sd;
        return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
    };
    law.cdf = [=](double v) { return 0.5 * std::erfc(-(v - mean) / (sd * std::numbers::sqrt2)); };
    return law;
}

namespace {

constexpr double kDensityTol = 1e-10;

// Joint density of (W_t, max_{s<=t} W_s) at (w, m), m >= max(0, w).
double joint_w_max(double w, double m, double t) {
    if (m < 0.0 || w > m) return 0.0;
    const double z = 2.0 * m - w;
    return 2.0 * z / (t * std::sqrt(2.0 * std::numbers::pi * t)) * std::exp(-z * z / (2.0 * t));
}

double singly_perturbed_density(double v, double c, double t) {
    // Integrate f(v - c m, m) over m >= max(0, v / (1 + c)); 2m - w = (2 + c) m - v.
    const double m_lo = std::max(0.0, v / (1.0 + c));
    const double z_lo = (2.0 + c) * m_lo - v;
    const double m_hi = m_lo + 12.0 * std::sqrt(t) / (2.0 + c);
    if (z_lo > 40.0 * std::sqrt(t)) return 0.0;
    const auto r = adaptive_simpson([&](double m) { return joint_w_max(v - c * m, m, t); }, m_lo,
                                    m_hi, kDensityTol, 40);
    if (!r.converged) {
        std::ostringstream os;
        os << "density quadrature failed at v = " << v;
        throw NumericalError(ErrorCode::QuadratureFail, os.str());
    }
    return r.value;
}

}  // namespace

ReferenceLaw reference_singly_perturbed(double alpha, double t) {
    if (!(alpha < 1.0) || !(t > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument,
                             "reference_singly_perturbed needs alpha < 1 and t > 0");
    }
    const double c = alpha / (1.0 - alpha);
    const double sd = std::sqrt(t);
    const double v_lo = -12.0 * sd;
    const double v_hi = 12.0 * std::max(1.0, 1.0 + c) * sd;

    constexpr std::size_t kCells = 2048;  // per side of the kink at 0
    std::vector<double> nodes;
    nodes.reserve(2 * kCells + 1);
    for (std::size_t k = 0; k < kCells; ++k) nodes.push_back(v_lo * (1.0 - static_cast<double>(k) / kCells));
    for (std::size_t k = 0; k <= kCells; ++k) nodes.push_back(v_hi * static_cast<double>(k) / kCells);

    std::vector<double> dens(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) dens[k] = singly_perturbed_density(nodes[k], c, t);
    std::vector<double> cum(nodes.size(), 0.0);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const auto r = adaptive_simpson([&](double v) { return singly_perturbed_density(v, c, t); },
                                        nodes[k - 1], nodes[k], 1e-12, 30);
        if (!r.converged) {
            throw NumericalError(ErrorCode::QuadratureFail, "cdf quadrature failed");
        }
        cum[k] = cum[k - 1] + r.value;
    }
    if (std::abs(cum.back() - 1.0) > 1e-8) {
        std::ostringstream os;
        os.precision(17);
        os << "reference law mass " << cum.back() << " differs from 1 by more than 1e-8";
        throw NumericalError(ErrorCode::QuadratureFail, os.str());
    }

    using Hermite = boost::math::interpolators::cubic_hermite<std::vector<double>>;
    auto spline = std::make_shared<const Hermite>(std::vector<double>(nodes), std::move(cum),
                                                  std::vector<double>(dens));
    ReferenceLaw law;
    law.kind = LawKind::SinglyPerturbedBM;
    law.density = [c, t](double v) { return singly_perturbed_density(v, c, t); };
    law.cdf = [spline, v_lo, v_hi](double v) {
        if (v <= v_lo) return 0.0;
        if (v >= v_hi) return 1.0;
        return std::clamp((*spline)(v), 0.0, 1.0);
    };
    return law;
}

AtomScan atom_scan(const Ensemble& e, double bin_width) {
    if (!(bin_width > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument, "atom_scan needs bin_width > 0");
    }
    AtomScan out;
    out.bin_width = bin_width;
    if (e.terminal_values.empty()) return out;
    std::vector<double> bins(e.terminal_values.size());
    std::transform(e.terminal_values.begin(), e.terminal_values.end(), bins.begin(),
                   [bin_width](double v) { return std::floor(v / bin_width); });
    std::sort(bins.begin(), bins.end());
    std::size_t best = 0;
    double best_bin = bins.front();
    for (std::size_t k = 0; k < bins.size();) {
        std::size_t j = k;
        while (j < bins.size() && bins[j] == bins[k]) ++j;
        if (j - k > best) {
            best = j - k;
            best_bin = bins[k];
        }
        k = j;
    }
    out.max_mass = static_cast<double>(best) / static_cast<double>(bins.size());
    out.location = (best_bin + 0.5) * bin_width;
    return out;
}

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw NumericalError(ErrorCode::InvalidArgument, "fit_log_log needs >= 2 matching points");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double cxx = sxx - sx * sx / n;
    const double cxy = sxy - sx * sy / n;
    const double cyy = syy - sy * sy / n;
    LogLogFit fit;
    fit.slope = cxy / cxx;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.r_squared = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
    return fit;
}

double silverman_bandwidth(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    if (values.size() < 2) {
        throw NumericalError(ErrorCode::InvalidArgument, "bandwidth needs at least 2 values");
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return 1.06 * sd * std::pow(n, -0.2);
}

KdeGrid kde(const Ensemble& e, std::optional<double> bandwidth, std::size_t grid_points,
            std::optional<std::pair<double, double>> range) {
    if (grid_points < 2) {
        throw NumericalError(ErrorCode::InvalidArgument, "kde needs at least 2 grid points");
    }
    if (e.terminal_values.empty()) {
        throw NumericalError(ErrorCode::InvalidArgument, "kde of an empty ensemble");
    }
    std::vector<double> v = e.terminal_values;
    std::sort(v.begin(), v.end());
    KdeGrid out;
    out.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(v);
    if (!(out.bandwidth > 0.0)) {
        throw NumericalError(ErrorCode::InvalidArgument, "kde bandwidth must be positive");
    }
    const double h = out.bandwidth;
    const double lo = range ? range->first : v.front() - 4.0 * h;
    const double hi = range ? range->second : v.back() + 4.0 * h;
    const double norm = 1.0 / (static_cast<double>(v.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    out.x.resize(grid_points);
    out.density.resize(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        // Kernel mass beyond 9h is below 1e-17 relative.
        const auto first = std::lower_bound(v.begin(), v.end(), x - 9.0 * h);
        const auto last = std::upper_bound(first, v.end(), x + 9.0 * h);
        double s = 0.0;
        for (auto it = first; it != last; ++it) {
            const double z = (x - *it) / h;
            s += std::exp(-0.5 * z * z);
        }
        out.x[g] = x;
        out.density[g] = s * norm;
    }
    return out;
}

double kde_mass(const KdeGrid& k) {
    double s = 0.0;
    for (std::size_t g = 1; g < k.x.size(); ++g) {
        s += 0.5 * (k.density[g] + k.density[g - 1]) * (k.x[g] - k.x[g - 1]);
    }
    return s;
}

KsResult ks_test(const Ensemble& e, const ReferenceLaw& law) {
    KsResult r;
    const std::size_t n = e.terminal_values.size();
    if (n == 0) {
        throw NumericalError(ErrorCode::InvalidArgument, "ks_test of an empty ensemble");
    }
    std::vector<double> v = e.terminal_values;
    std::sort(v.begin(), v.end());
    const auto nn = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = law.cdf(v[k]);
        d = std::max({d, static_cast<double>(k + 1) / nn - f, f - static_cast<double>(k) / nn});
    }
    r.statistic = d;
    r.critical_1pct = 1.63 / std::sqrt(nn);
    r.critical_5pct = 1.36 / std::sqrt(nn);
    r.pass_1pct = d < r.critical_1pct;
    r.pass_5pct = d < r.critical_5pct;
    r.low_power = n < 35;
    return r;
}

void write_ensemble_csv(std::ostream& os, const Ensemble& e) {
    os << "path,x_T\r\n";
    for (std::size_t p = 0; p < e.terminal_values.size(); ++p) {
        os << p << ',' << format_double(e.terminal_values[p]) << "\r\n";
    }
}

void write_kde_csv(std::ostream& os, const KdeGrid& k) {
    os << "x,density\r\n";
    for (std::size_t g = 0; g < k.x.size(); ++g) {
        os << format_double(k.x[g]) << ',' << format_double(k.density[g]) << "\r\n";
    }
}

}  // namespace psde

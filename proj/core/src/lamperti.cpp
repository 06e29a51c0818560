#include "psde/lamperti.hpp"

#include "psde/error.hpp"
#include "psde/quadrature.hpp"
#include "psde/skorokhod.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace psde {

struct Transform::Spline {
    boost::math::interpolators::cubic_hermite<std::vector<double>> hermite;
};

namespace {

constexpr double kCellTol = 1e-13;
constexpr double kExtensionTol = 1e-10;

void require_positive_sigma(double s, double y) {
    if (!(s > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "sigma(" << y << ") = " << s << " is not positive";
        throw NumericalError(ErrorCode::SigmaNotPositive, os.str());
    }
}

}  // namespace

Transform build_transform(const CoefficientModel& model, double x, Interval range,
                          std::size_t n_nodes) {
    if (!(range.lo < range.hi) || n_nodes < 4) {
        throw NumericalError(ErrorCode::InvalidArgument, "build_transform needs lo < hi and >= 4 nodes");
    }
    range.lo = std::min(range.lo, x);
    range.hi = std::max(range.hi, x);

    std::vector<double> nodes;
    nodes.reserve(n_nodes + 1);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        nodes.push_back(range.lo + (range.hi - range.lo) * static_cast<double>(k) /
                                       static_cast<double>(n_nodes - 1));
    }
    nodes.back() = range.hi;
    const auto pos = std::lower_bound(nodes.begin(), nodes.end(), x);
    if (pos == nodes.end() || *pos != x) {
        const auto inserted = nodes.insert(pos, x);
        // Keep cells from collapsing when x sits next to a node.
        const double min_gap = 1e-3 * (range.hi - range.lo) / static_cast<double>(n_nodes);
        if (inserted != nodes.begin() && *inserted - *(inserted - 1) < min_gap) {
            nodes.erase(inserted - 1);
        } else if (inserted + 1 != nodes.end() && *(inserted + 1) - *inserted < min_gap) {
            nodes.erase(inserted + 1);
        }
    }

    auto inv_sigma = [&model](double u) {
        const double s = model.sigma(u);
        require_positive_sigma(s, u);
        return 1.0 / s;
    };

    std::vector<double> slopes(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) slopes[k] = inv_sigma(nodes[k]);

    std::vector<double> cumulative(nodes.size(), 0.0);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        cumulative[k] = cumulative[k - 1] + integrate(inv_sigma, nodes[k - 1], nodes[k], kCellTol);
    }
    const auto anchor_idx = static_cast<std::size_t>(
        std::find(nodes.begin(), nodes.end(), x) - nodes.begin());
    const double offset = cumulative[anchor_idx];
    for (auto& v : cumulative) v -= offset;
    cumulative[anchor_idx] = 0.0;

    Transform t;
    t.model_ = model;
    t.anchor_ = x;
    t.nodes_ = nodes;
    t.values_ = cumulative;
    t.spline_ = std::make_shared<const Transform::Spline>(Transform::Spline{
        boost::math::interpolators::cubic_hermite<std::vector<double>>(
            std::move(nodes), std::move(cumulative), std::move(slopes))});
    return t;
}

double Transform::g(double y) const {
    const double lo = nodes_.front();
    const double hi = nodes_.back();
    if (y == anchor_) return 0.0;
    auto inv_sigma = [this](double u) {
        const double s = model_.sigma(u);
        require_positive_sigma(s, u);
        return 1.0 / s;
    };
    if (y > hi) return values_.back() + integrate(inv_sigma, hi, y, kExtensionTol);
    if (y < lo) return values_.front() - integrate(inv_sigma, y, lo, kExtensionTol);
    return spline_->hermite(y);
}

double Transform::g_prime(double y) const {
    return 1.0 / model_.sigma(y);
}

double Transform::g_inv(double z) const {
    if (z == 0.0) return anchor_;
    double a = 0.0;
    double b = 0.0;
    if (z < values_.front() || z > values_.back()) {
        // Expand a bracket outside the table; G grows at least like y / sigma_sup.
        const double width = nodes_.back() - nodes_.front();
        double step = width;
        if (z > values_.back()) {
            a = nodes_.back();
            b = a + step;
            while (g(b) < z) {
                a = b;
                step *= 2.0;
                b = a + step;
            }
        } else {
            b = nodes_.front();
            a = b - step;
            while (g(a) > z) {
                b = a;
                step *= 2.0;
                a = b - step;
            }
        }
    } else {
        const auto it = std::lower_bound(values_.begin(), values_.end(), z);
        const auto k = static_cast<std::size_t>(it - values_.begin());
        if (*it == z) return nodes_[k];
        a = nodes_[k - 1];
        b = nodes_[k];
    }
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        [&](double y) { return g(y) - z; }, a, b, boost::math::tools::eps_tolerance<double>(52),
        max_iter);
    return 0.5 * (lo + hi);
}

double Transform::b_tilde(double z) const {
    const double y = g_inv(z);
    return model_.b(y) / model_.sigma(y) - 0.5 * model_.sigma_prime(y);
}

double Transform::b_tilde_prime(double z) const {
    // d/dz = sigma(y) d/dy with y = G^-1(z)
    const double y = g_inv(z);
    const double s = model_.sigma(y);
    const double sp = model_.sigma_prime(y);
    double spp = 0.0;
    if (model_.sigma_second) {
        spp = model_.sigma_second(y);
    } else {
        const double h = 1e-5 * std::max(1.0, std::abs(y));
        spp = (model_.sigma_prime(y + h) - model_.sigma_prime(y - h)) / (2.0 * h);
    }
    return model_.b_prime(y) - model_.b(y) * sp / s - 0.5 * s * spp;
}

CoefficientModel Transform::reduced_model() const {
    CoefficientModel m;
    m.name = "lamperti(" + model_.name + ")";
    auto self = std::make_shared<const Transform>(*this);
    m.b = [self](double z) { return self->b_tilde(z); };
    m.b_prime = [self](double z) { return self->b_tilde_prime(z); };
    m.sigma = [](double) { return 1.0; };
    m.sigma_prime = [](double) { return 0.0; };
    m.sigma_second = [](double) { return 0.0; };
    double sup = 0.0;
    const std::size_t samples = std::min<std::size_t>(values_.size(), 4096);
    for (std::size_t k = 0; k < samples; ++k) {
        const std::size_t idx = k * (values_.size() - 1) / std::max<std::size_t>(samples - 1, 1);
        sup = std::max(sup, std::abs(b_tilde_prime(values_[idx])));
    }
    m.b_prime_sup = sup;
    m.lipschitz_k = sup;
    m.sigma_inf = 1.0;
    m.sigma_sup = 1.0;
    return m;
}

void Transform::write_csv(std::ostream& os) const {
    os << "y,G\r\n";
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        os << format_double(nodes_[k]) << ',' << format_double(values_[k]) << "\r\n";
    }
}

bool ReductionReport::monotone_decrease() const {
    for (std::size_t l = 1; l < levels.size(); ++l) {
        if (!(levels[l].sup_discrepancy < levels[l - 1].sup_discrepancy)) return false;
    }
    return true;
}

bool ReductionReport::commutation_exact() const {
    return std::all_of(levels.begin(), levels.end(),
                       [](const ReductionLevel& l) { return l.commutation_exact; });
}

namespace {

CoefficientModel negated_sigma(const CoefficientModel& model) {
    CoefficientModel m = model;
    m.sigma = [s = model.sigma](double x) { return -s(x); };
    m.sigma_prime = [s = model.sigma_prime](double x) { return -s(x); };
    if (model.sigma_second) {
        m.sigma_second = [s = model.sigma_second](double x) { return -s(x); };
    }
    return m;
}

}  // namespace

ReductionReport pathwise_reduction_check(const CoefficientModel& model,
                                         const PerturbationParams& params, const SimConfig& cfg,
                                         std::size_t refinements, std::size_t factor) {
    if (factor < 2) {
        throw NumericalError(ErrorCode::InvalidArgument, "refinement factor must be >= 2");
    }
    ReductionReport report;
    std::size_t finest = cfg.n_steps;
    for (std::size_t l = 0; l < refinements; ++l) finest *= factor;
    auto dw_fine = brownian_driver(finest, cfg.horizon, cfg.seed);

    const double x0 = cfg.x / params.unperturbed_divisor();
    CoefficientModel work = model;
    if (model.sigma(x0) < 0.0) {
        // sigma(X) dW = (-sigma)(X) d(-W)
        work = negated_sigma(model);
        for (auto& v : dw_fine) v = -v;
        report.sigma_negated = true;
    }

    std::vector<std::vector<double>> drivers(refinements + 1);
    std::vector<Path> xs(refinements + 1);
    double lo = x0;
    double hi = x0;
    for (std::size_t l = 0; l <= refinements; ++l) {
        std::size_t coarse = 1;
        for (std::size_t r = l; r < refinements; ++r) coarse *= factor;
        drivers[l] = coarsen_increments(dw_fine, coarse);
        SimConfig c = cfg;
        c.n_steps = drivers[l].size();
        xs[l] = simulate_per_step(work, params, c, drivers[l]);
        lo = std::min(lo, *std::min_element(xs[l].x.begin(), xs[l].x.end()));
        hi = std::max(hi, *std::max_element(xs[l].x.begin(), xs[l].x.end()));
    }
    double sigma_max = 0.0;
    for (std::size_t k = 0; k <= 256; ++k) {
        sigma_max = std::max(sigma_max, std::abs(work.sigma(lo + (hi - lo) * k / 256.0)));
    }
    const double margin = 5.0 * sigma_max * std::sqrt(cfg.horizon);
    report.range = {lo - margin, hi + margin};
    const Transform transform = build_transform(work, cfg.x, report.range);
    const CoefficientModel reduced = transform.reduced_model();
    report.y_start = params.unperturbed_divisor() * transform.g(x0);

    for (std::size_t l = 0; l <= refinements; ++l) {
        SimConfig c = cfg;
        c.n_steps = drivers[l].size();
        c.x = report.y_start;
        const Path y = simulate_per_step(reduced, params, c, drivers[l]);
        const Path& x = xs[l];

        ReductionLevel level;
        level.n_steps = c.n_steps;
        level.dt = c.grid().dt();
        std::vector<double> gx(x.x.size());
        for (std::size_t k = 0; k < gx.size(); ++k) {
            gx[k] = transform.g(x.x[k]);
            level.sup_discrepancy = std::max(level.sup_discrepancy, std::abs(gx[k] - y.x[k]));
        }
        std::vector<double> gmax(gx.size());
        std::vector<double> gmin(gx.size());
        running_max(gx, gmax);
        running_min(gx, gmin);
        for (std::size_t k = 0; k < gx.size(); ++k) {
            if (gmax[k] != transform.g(x.m[k]) || gmin[k] != transform.g(x.i[k])) {
                level.commutation_exact = false;
                break;
            }
        }
        report.levels.push_back(level);
    }
    return report;
}

}  // namespace psde

#include "cli.hpp"

#include "config.hpp"

#include "psde/density.hpp"
#include "psde/error.hpp"
#include "psde/lamperti.hpp"
#include "psde/malliavin.hpp"
#include "psde/parallel.hpp"
#include "psde/rng.hpp"
#include "psde/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace psde::cli {

namespace {

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

class Artifacts {
public:
    explicit Artifacts(const ExperimentConfig& cfg) : dir_(cfg.out_dir), fingerprint_(hex64(cfg.fingerprint)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) {
            throw CliError(kExitIo, "IO_ERROR", "cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    void csv(const std::string& name, const std::function<void(std::ostream&)>& body) {
        write(name, [&](std::ostream& os) {
            os << "# psde " << kVersion << " fingerprint " << fingerprint_ << "\r\n";
            body(os);
        });
    }

    void report(const std::string& name, json j) {
        j["version"] = kVersion;
        j["fingerprint"] = fingerprint_;
        j["artifacts"] = files_;
        write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const auto path = dir_ / name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw CliError(kExitIo, "IO_ERROR", "cannot open " + path.string() + " for writing");
        body(os);
        os.flush();
        if (!os) throw CliError(kExitIo, "IO_ERROR", "write to " + path.string() + " failed");
        files_.push_back(name);
    }

    std::filesystem::path dir_;
    std::string fingerprint_;
    std::vector<std::string> files_;
};

json base_report(const std::string& subcommand, const ExperimentConfig& cfg) {
    return {{"subcommand", subcommand}, {"config", cfg.canonical}};
}

std::vector<double> path_driver(const SimConfig& sim, std::size_t p) {
    return brownian_driver(sim.n_steps, sim.horizon, stream_seed(sim.seed, p));
}

double b_prime_bound(const ExperimentConfig& cfg) {
    return cfg.analysis.b_prime_sup ? *cfg.analysis.b_prime_sup : cfg.model.b_prime_sup;
}

json smoothness_json(double alpha, double beta, double bps) {
    const auto sc = smooth_density_horizon(alpha, beta, bps);
    return {{"b_prime_sup", bps},
            {"alpha2_plus_beta2", alpha * alpha + beta * beta},
            {"threshold", kSmoothThreshold},
            {"threshold_ok", sc.threshold_ok},
            {"t0", finite_or_null(sc.t0)},
            {"t0_infinite", sc.t0_infinite},
            {"c_of_t0", sc.c_of_t}};
}

// ---- subcommands ---------------------------------------------------------

int cmd_validate(const ExperimentConfig& cfg, Artifacts& art, json& report, std::ostream& err) {
    const auto& v = cfg.validation;
    report["accepted"] = static_cast<bool>(v);
    report["rejection"] = to_string(v.rejection);
    report["rho"] = finite_or_null(v.rho);
    report["message"] = v.message;
    report["smoothness"] = smoothness_json(cfg.alpha, cfg.beta, b_prime_bound(cfg));
    art.report("validate.json", report);
    if (!v) {
        err << json{{"error", {{"code", to_string(v.rejection)}, {"message", v.message}, {"exit_code", kExitValidation}}}}.dump()
            << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, Artifacts& art, json& report) {
    const auto& params = cfg.params();
    const std::size_t n = std::max<std::size_t>(cfg.analysis.n_paths, 1);
    std::vector<Path> paths(n);
    std::vector<std::size_t> outer(n, 0);
    parallel_for(n, default_thread_count(), [&](std::size_t p) {
        const auto dw = path_driver(cfg.sim, p);
        if (cfg.sim.scheme == Scheme::Picard) {
            auto r = simulate_picard(cfg.model, params, cfg.sim, dw);
            outer[p] = r.outer_iterations;
            paths[p] = std::move(r.path);
        } else {
            paths[p] = simulate_per_step(cfg.model, params, cfg.sim, dw);
        }
    });
    art.csv("paths.csv", [&](std::ostream& os) {
        os << "path,t,x,m,i,w\r\n";
        for (std::size_t p = 0; p < n; ++p) {
            const Path& path = paths[p];
            for (std::size_t k = 0; k < path.x.size(); ++k) {
                os << p << ',' << format_double(path.grid.time(k)) << ',' << format_double(path.x[k]) << ','
                   << format_double(path.m[k]) << ',' << format_double(path.i[k]) << ','
                   << format_double(path.w[k]) << "\r\n";
            }
        }
    });
    json rows = json::array();
    for (std::size_t p = 0; p < n; ++p) {
        json r = {{"path", p},
                  {"terminal", paths[p].terminal()},
                  {"max", paths[p].m.back()},
                  {"min", paths[p].i.back()},
                  {"dynamics_residual", dynamics_residual(paths[p], cfg.model, params)}};
        if (cfg.sim.scheme == Scheme::Picard) r["outer_iterations"] = outer[p];
        rows.push_back(r);
    }
    report["paths"] = rows;
    report["rho"] = params.rho;
    art.report("simulate.json", report);
    return kExitOk;
}

int cmd_picard_compare(const ExperimentConfig& cfg, Artifacts& art, json& report) {
    const auto& params = cfg.params();
    const std::size_t levels = cfg.analysis.levels;
    const std::size_t n_paths = std::max<std::size_t>(cfg.analysis.n_paths, 1);
    std::size_t finest = cfg.sim.n_steps;
    for (std::size_t l = 1; l < levels; ++l) finest *= 2;

    struct Row {
        std::size_t n_steps;
        double dt;
        double discrepancy;
        std::size_t outer;
    };
    std::vector<std::vector<Row>> rows(n_paths, std::vector<Row>(levels));
    parallel_for(n_paths, default_thread_count(), [&](std::size_t p) {
        const auto fine = brownian_driver(finest, cfg.sim.horizon, stream_seed(cfg.sim.seed, p));
        for (std::size_t l = 0; l < levels; ++l) {
            const std::size_t factor = std::size_t{1} << (levels - 1 - l);
            const auto dw = coarsen_increments(fine, factor);
            SimConfig sim = cfg.sim;
            sim.n_steps = dw.size();
            const Path a = simulate_per_step(cfg.model, params, sim, dw);
            const PicardResult b = simulate_picard(cfg.model, params, sim, dw);
            double d = 0.0;
            for (std::size_t k = 0; k < a.x.size(); ++k) d = std::max(d, std::abs(a.x[k] - b.path.x[k]));
            rows[p][l] = {sim.n_steps, sim.grid().dt(), d, b.outer_iterations};
        }
    });
    art.csv("picard_compare.csv", [&](std::ostream& os) {
        os << "path,n_steps,dt,sup_discrepancy,outer_iterations\r\n";
        for (std::size_t p = 0; p < n_paths; ++p) {
            for (const Row& r : rows[p]) {
                os << p << ',' << r.n_steps << ',' << format_double(r.dt) << ',' << format_double(r.discrepancy) << ','
                   << r.outer << "\r\n";
            }
        }
    });
    json summary = json::array();
    double prev = 0.0;
    for (std::size_t l = 0; l < levels; ++l) {
        double mean = 0.0;
        double worst = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            mean += rows[p][l].discrepancy;
            worst = std::max(worst, rows[p][l].discrepancy);
        }
        mean /= static_cast<double>(n_paths);
        json s = {{"n_steps", rows[0][l].n_steps},
                  {"dt", rows[0][l].dt},
                  {"mean_sup_discrepancy", mean},
                  {"max_sup_discrepancy", worst}};
        s["ratio_to_previous"] = l == 0 || prev == 0.0 ? json(nullptr) : json(mean / prev);
        prev = mean;
        summary.push_back(s);
    }
    report["levels"] = summary;
    art.report("picard_compare.json", report);
    return kExitOk;
}

int cmd_malliavin(const ExperimentConfig& cfg, Artifacts& art, json& report) {
    const auto& params = cfg.params();
    const SimConfig& sim = cfg.sim;
    const auto dw = path_driver(sim, 0);
    const Path path = simulate_per_step(cfg.model, params, sim, dw);
    const DerivativeField field = derivative_field(path, cfg.model, params);
    const auto profile = h_norm_profile(field);

    art.csv("field.csv", [&](std::ostream& os) { write_field_csv(os, field); });
    art.csv("h_norm.csv", [&](std::ostream& os) {
        os << "t,h_norm\r\n";
        for (std::size_t k = 0; k < profile.size(); ++k) {
            os << format_double(sim.grid().time(k)) << ',' << format_double(profile[k]) << "\r\n";
        }
    });

    const std::size_t m = cfg.analysis.fd_intervals;
    json checks = json::array();
    double worst = 0.0;
    std::vector<std::array<double, 4>> fd_rows;
    for (std::size_t q = 0; q < m; ++q) {
        const double lo = sim.horizon * static_cast<double>(q) / static_cast<double>(m);
        const double hi = sim.horizon * static_cast<double>(q + 1) / static_cast<double>(m);
        const double analytic = directional_derivative(field, lo, hi);
        const auto fd = cameron_martin_directional(cfg.model, params, sim, dw, lo, hi, cfg.analysis.fd_eps);
        const double rel = std::abs(fd.value - analytic) / std::max(std::abs(analytic), 1e-300);
        if (!fd.eps_too_small) worst = std::max(worst, rel);
        fd_rows.push_back({lo, hi, analytic, fd.value});
        checks.push_back({{"r_lo", lo}, {"r_hi", hi}, {"analytic", analytic}, {"finite_difference", fd.value},
                          {"relative_error", rel}, {"eps_too_small", fd.eps_too_small}});
    }
    art.csv("fd_check.csv", [&](std::ostream& os) {
        os << "r_lo,r_hi,analytic,finite_difference\r\n";
        for (const auto& r : fd_rows) {
            os << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << ','
               << format_double(r[3]) << "\r\n";
        }
    });

    const std::size_t n_paths = std::max<std::size_t>(cfg.analysis.n_paths, 1);
    std::vector<double> norms(n_paths);
    parallel_for(n_paths, default_thread_count(), [&](std::size_t p) {
        const Path pp = simulate_per_step(cfg.model, params, sim, path_driver(sim, p));
        const DerivativeField f = derivative_field(pp, cfg.model, params);
        norms[p] = h_norm(f, sim.n_steps).value;
    });
    const auto pos = positivity_report(norms, sim.horizon, cfg.analysis.h_threshold, cfg.model.sigma_inf);
    report["h_norm_terminal"] = profile.back();
    report["jump_locations"] = field.jump_locations();
    report["finite_difference"] = {{"intervals", checks}, {"max_relative_error", worst}, {"eps", cfg.analysis.fd_eps}};
    report["positivity"] = {{"n_paths", pos.n_paths},   {"t", pos.t},
                            {"min", pos.min},           {"q05", pos.q05},
                            {"median", pos.median},     {"q95", pos.q95},
                            {"max", pos.max},           {"threshold", pos.threshold},
                            {"fraction_at_or_below", pos.fraction_at_or_below},
                            {"hypothesis_ok", pos.hypothesis_ok},
                            {"all_positive", pos.all_positive}};
    art.report("malliavin.json", report);
    return kExitOk;
}

int cmd_density(const ExperimentConfig& cfg, Artifacts& art, json& report) {
    const auto& params = cfg.params();
    const auto& a = cfg.analysis;
    const Ensemble e = generate_ensemble(cfg.model, params, cfg.sim, a.n_paths);
    art.csv("ensemble.csv", [&](std::ostream& os) { write_ensemble_csv(os, e); });

    report["n_paths"] = e.n_paths;
    report["low_sample"] = e.n_paths < 1000;
    if (e.n_paths >= 2) {
        const KdeGrid k = kde(e, a.bandwidth, a.kde_grid);
        art.csv("kde.csv", [&](std::ostream& os) { write_kde_csv(os, k); });
        report["kde"] = {{"bandwidth", k.bandwidth}, {"mass", kde_mass(k)}, {"grid_points", k.x.size()}};

        double mean = 0.0;
        for (double v : e.terminal_values) mean += v;
        mean /= static_cast<double>(e.n_paths);
        double ss = 0.0;
        for (double v : e.terminal_values) ss += (v - mean) * (v - mean);
        const double var = ss / static_cast<double>(e.n_paths - 1);
        report["moments"] = {{"mean", mean}, {"variance", var},
                             {"standard_error", std::sqrt(var / static_cast<double>(e.n_paths))}};
    }

    if (e.n_paths >= 1) {
        json atoms = json::array();
        std::vector<double> widths;
        std::vector<double> masses;
        for (double w : a.bin_widths) {
            const AtomScan s = atom_scan(e, w);
            atoms.push_back({{"bin_width", w}, {"max_mass", s.max_mass}, {"location", s.location}});
            widths.push_back(w);
            masses.push_back(s.max_mass);
        }
        art.csv("atoms.csv", [&](std::ostream& os) {
            os << "bin_width,max_mass,location\r\n";
            for (const auto& r : atoms) {
                os << format_double(r["bin_width"].get<double>()) << ',' << format_double(r["max_mass"].get<double>())
                   << ',' << format_double(r["location"].get<double>()) << "\r\n";
            }
        });
        json scan = {{"bins", atoms}};
        if (widths.size() >= 2) {
            const LogLogFit fit = fit_log_log(widths, masses);
            scan["log_log_slope"] = fit.slope;
            scan["log_log_r_squared"] = fit.r_squared;
        }
        report["atom_scan"] = scan;

        if (a.reference != ReferenceKind::None) {
            ReferenceLaw law;
            const bool brownian = cfg.model_spec["drift"] == json{{"kind", "constant"}, {"value", 0.0}} &&
                                  cfg.model_spec["diffusion"]["kind"] == "constant";
            bool applicable = false;
            if (a.reference == ReferenceKind::Gaussian) {
                const double s = cfg.model.sigma(0.0);
                law = gaussian_law(cfg.sim.x, s * s * cfg.sim.horizon);
                applicable = brownian && params.alpha == 0.0 && params.beta == 0.0;
            } else {
                law = reference_singly_perturbed(params.alpha, cfg.sim.horizon);
                applicable = brownian && cfg.model.sigma(0.0) == 1.0 && params.beta == 0.0 && cfg.sim.x == 0.0;
            }
            const KsResult ks = ks_test(e, law);
            report["ks"] = {{"reference", cfg.canonical["analysis"]["reference"]},
                            {"reference_applicable", applicable},
                            {"statistic", ks.statistic},
                            {"critical_1pct", ks.critical_1pct},
                            {"critical_5pct", ks.critical_5pct},
                            {"pass_1pct", ks.pass_1pct},
                            {"pass_5pct", ks.pass_5pct},
                            {"low_power", ks.low_power}};
        }
    }
    art.report("density.json", report);
    return kExitOk;
}

int cmd_lamperti_check(const ExperimentConfig& cfg, Artifacts& art, json& report) {
    const auto& params = cfg.params();
    const std::size_t n_paths = std::max<std::size_t>(cfg.analysis.n_paths, 1);
    std::vector<ReductionReport> reports(n_paths);
    parallel_for(n_paths, default_thread_count(), [&](std::size_t p) {
        SimConfig sim = cfg.sim;
        sim.seed = stream_seed(cfg.sim.seed, p);
        reports[p] = pathwise_reduction_check(cfg.model, params, sim, cfg.analysis.refinements,
                                              cfg.analysis.refinement_factor);
    });
    art.csv("lamperti.csv", [&](std::ostream& os) {
        os << "path,n_steps,dt,sup_discrepancy,commutation_exact\r\n";
        for (std::size_t p = 0; p < n_paths; ++p) {
            for (const auto& l : reports[p].levels) {
                os << p << ',' << l.n_steps << ',' << format_double(l.dt) << ',' << format_double(l.sup_discrepancy)
                   << ',' << (l.commutation_exact ? "true" : "false") << "\r\n";
            }
        }
    });
    std::size_t monotone = 0;
    bool commutation = true;
    json per_path = json::array();
    for (std::size_t p = 0; p < n_paths; ++p) {
        const auto& r = reports[p];
        monotone += r.monotone_decrease() ? 1 : 0;
        commutation = commutation && r.commutation_exact();
        json lv = json::array();
        for (const auto& l : r.levels) lv.push_back(l.sup_discrepancy);
        per_path.push_back({{"path", p},
                            {"sup_discrepancy", lv},
                            {"monotone_decrease", r.monotone_decrease()},
                            {"y_start", r.y_start},
                            {"sigma_negated", r.sigma_negated}});
    }
    report["paths"] = per_path;
    report["monotone_fraction"] = static_cast<double>(monotone) / static_cast<double>(n_paths);
    report["commutation_exact"] = commutation;
    art.report("lamperti.json", report);
    return kExitOk;
}

int cmd_constants(const ExperimentConfig& cfg, Artifacts& art, json& report) {
    const double alpha = cfg.alpha;
    const double beta = cfg.beta;
    const double bps = b_prime_bound(cfg);
    const auto sc = smooth_density_horizon(alpha, beta, bps);
    std::vector<double> ts = cfg.analysis.t_values;
    if (ts.empty()) {
        const double top = sc.t0 > 0.0 && std::isfinite(sc.t0) ? 2.0 * sc.t0 : cfg.sim.horizon;
        for (std::size_t k = 1; k <= 16; ++k) ts.push_back(top * static_cast<double>(k) / 16.0);
    }
    const double sigma = cfg.model.sigma_inf;
    json table = json::array();
    struct Row {
        double t, c, bound;
        bool vacuous;
    };
    std::vector<Row> rows;
    for (double t : ts) {
        const double c = smoothness_constant(t, alpha, beta, bps);
        const HNormBound b = hnorm_lower_bound(t, t, sigma, alpha, beta, bps);
        rows.push_back({t, c, b.value, b.vacuous});
        table.push_back({{"t", t}, {"c_of_t", c}, {"below_one", c < 1.0}, {"hnorm_lower_bound", b.value},
                         {"vacuous", b.vacuous}});
    }
    art.csv("constants.csv", [&](std::ostream& os) {
        os << "t,c_of_t,hnorm_lower_bound,vacuous\r\n";
        for (const Row& r : rows) {
            os << format_double(r.t) << ',' << format_double(r.c) << ',' << format_double(r.bound) << ','
               << (r.vacuous ? "true" : "false") << "\r\n";
        }
    });
    report["smoothness"] = smoothness_json(alpha, beta, bps);
    report["sigma_for_bound"] = sigma;
    report["table"] = table;
    report["params_accepted"] = static_cast<bool>(cfg.validation);
    report["rho"] = finite_or_null(cfg.validation.rho);
    art.report("constants.json", report);
    return kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::SigmaNotPositive:
            return kExitValidation;
        case ErrorCode::NoConvergence:
        case ErrorCode::CaseInconsistent:
        case ErrorCode::NonFinite:
        case ErrorCode::QuadratureFail:
            return kExitNumerical;
    }
    return kExitNumerical;
}

void emit_error(std::ostream& err, int exit_code, std::string_view code, const std::string& message,
                const std::vector<double>& history = {}) {
    json e = {{"code", code}, {"message", message}, {"exit_code", exit_code}};
    if (!history.empty()) e["history"] = history;
    err << json{{"error", e}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Doubly perturbed diffusion experiments", "psde"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t steps = 0;
    std::string out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON experiment config");
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    auto* paths_opt = app.add_option("--paths", paths, "number of paths");
    auto* steps_opt = app.add_option("--steps", steps, "time steps per path")->check(CLI::PositiveNumber);
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    app.add_flag("--quiet", quiet, "do not print the report");

    using Command = std::function<int(const ExperimentConfig&, Artifacts&, json&)>;
    const std::vector<std::pair<std::string, std::string>> names = {
        {"validate", "parameter report: rho, t0, threshold"},
        {"simulate", "simulate paths to CSV"},
        {"picard-compare", "per-step vs Picard discrepancy table"},
        {"malliavin", "derivative field, H-norm and finite-difference check"},
        {"density", "ensemble, KDE, atom scan, KS"},
        {"lamperti-check", "Lamperti reduction discrepancy"},
        {"constants", "C(t), t0 and lower-bound table"},
    };
    for (const auto& [name, help] : names) app.add_subcommand(name, help);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::ValidationError) ||
            e.get_exit_code() == static_cast<int>(CLI::ExitCodes::ConversionError)) {
            msg = "bad option value: " + msg;
        }
        emit_error(err, kExitValidation, "USAGE", msg);
        return kExitValidation;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        Overrides ov;
        if (*seed_opt) ov.seed = seed;
        if (*paths_opt) ov.paths = paths;
        if (*steps_opt) ov.steps = steps;
        if (*out_opt) ov.out = out_dir;
        const ExperimentConfig cfg =
            config_path.empty() ? parse_config(json::object(), ov) : load_config(config_path, ov);

        Artifacts art(cfg);
        json report = base_report(sub, cfg);
        int code = kExitOk;
        if (sub == "validate") {
            code = cmd_validate(cfg, art, report, err);
        } else {
            static const std::map<std::string, Command> commands = {
                {"simulate", cmd_simulate},
                {"picard-compare", cmd_picard_compare},
                {"malliavin", cmd_malliavin},
                {"density", cmd_density},
                {"lamperti-check", cmd_lamperti_check},
                {"constants", cmd_constants},
            };
            code = commands.at(sub)(cfg, art, report);
        }
        if (!quiet) {
            report["version"] = kVersion;
            report["fingerprint"] = hex64(cfg.fingerprint);
            report["artifacts"] = art.files();
            out << report.dump(2) << '\n';
        }
        return code;
    } catch (const CliError& e) {
        emit_error(err, e.exit_code(), e.code(), e.what());
        return e.exit_code();
    } catch (const NumericalError& e) {
        const int code = exit_code_for(e.code());
        emit_error(err, code, to_string(e.code()), e.what(), e.history());
        return code;
    } catch (const std::exception& e) {
        emit_error(err, kExitNumerical, "INTERNAL", e.what());
        return kExitNumerical;
    }
}

}  // namespace psde::cli

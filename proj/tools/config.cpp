#include "config.hpp"

#include "psde/density.hpp"
#include "psde/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace psde::cli {

namespace {

[[noreturn]] void config_error(const std::string& message) {
    throw CliError(kExitValidation, "INVALID_CONFIG", message);
}

// Strict view of one JSON object: every key must be consumed before finish().
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) config_error(path_ + " must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* raw(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_number()) config_error(where(key) + " must be a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) config_error(where(key) + " must be finite");
        return d;
    }

    double required_number(const std::string& key) {
        if (!has(key)) config_error(where(key) + " is required");
        return number(key, 0.0);
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                        v->get<std::int64_t>() < 0)) {
            config_error(where(key) + " must be a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_string()) config_error(where(key) + " must be a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_array()) config_error(where(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number()) config_error(where(key) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!used_.count(key)) config_error("unknown key " + where(key));
        }
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) config_error(what + " must be > 0");
}

std::pair<std::vector<double>, std::vector<double>> read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "IO_ERROR", "cannot read coefficient table " + path.string());
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) config_error(path.string() + ": line " + std::to_string(line_no) + " is not x,y");
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        char* end_a = nullptr;
        char* end_b = nullptr;
        const double x = std::strtod(a.c_str(), &end_a);
        const double y = std::strtod(b.c_str(), &end_b);
        if (end_a == a.c_str() || end_b == b.c_str()) {
            if (xs.empty() && line_no == 1) continue;  // header row
            config_error(path.string() + ": line " + std::to_string(line_no) + " is not numeric");
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    return {xs, ys};
}

const char* reference_name(ReferenceKind k) {
    switch (k) {
        case ReferenceKind::None: return "none";
        case ReferenceKind::Gaussian: return "gaussian";
        case ReferenceKind::SinglyPerturbed: return "singly_perturbed";
    }
    return "none";
}

}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const PerturbationParams& ExperimentConfig::params() const {
    if (!validation) {
        throw CliError(kExitValidation, to_string(validation.rejection), validation.message);
    }
    return *validation.params;
}

ScalarFunction parse_coefficient(const json& spec, const std::filesystem::path& base_dir,
                                 json& canonical) {
    Section s(spec, "coefficient");
    const std::string kind = s.string("kind", "");
    canonical = json::object();
    canonical["kind"] = kind;
    try {
        if (kind == "constant") {
            const double v = s.required_number("value");
            s.finish();
            canonical["value"] = v;
            return coefficient::constant(v);
        }
        if (kind == "affine_clipped") {
            const double a = s.required_number("intercept");
            const double k = s.required_number("slope");
            const double lo = s.required_number("lower");
            const double hi = s.required_number("upper");
            s.finish();
            canonical.update({{"intercept", a}, {"slope", k}, {"lower", lo}, {"upper", hi}});
            return coefficient::affine_clipped(a, k, lo, hi);
        }
        if (kind == "sinusoidal") {
            const double off = s.required_number("offset");
            const double amp = s.required_number("amplitude");
            const double freq = s.required_number("frequency");
            const double phase = s.number("phase", 0.0);
            s.finish();
            canonical.update({{"offset", off}, {"amplitude", amp}, {"frequency", freq}, {"phase", phase}});
            return coefficient::sinusoidal(off, amp, freq, phase);
        }
        if (kind == "logistic") {
            const double off = s.required_number("offset");
            const double amp = s.required_number("amplitude");
            const double k = s.required_number("steepness");
            const double c = s.number("center", 0.0);
            s.finish();
            canonical.update({{"offset", off}, {"amplitude", amp}, {"steepness", k}, {"center", c}});
            return coefficient::logistic(off, amp, k, c);
        }
        if (kind == "reciprocal_sinusoid") {
            const double amp = s.required_number("amplitude");
            s.finish();
            canonical["amplitude"] = amp;
            return coefficient::reciprocal_sinusoid(amp);
        }
        if (kind == "tabulated") {
            std::vector<double> xs;
            std::vector<double> ys;
            if (s.has("file")) {
                if (s.has("x") || s.has("y")) config_error("tabulated coefficient takes either file or x/y");
                const std::filesystem::path file = base_dir / s.string("file", "");
                std::tie(xs, ys) = read_table(file);
            } else {
                xs = s.numbers("x", {});
                ys = s.numbers("y", {});
            }
            s.finish();
            canonical["x"] = xs;
            canonical["y"] = ys;
            return coefficient::tabulated(std::move(xs), std::move(ys));
        }
    } catch (const NumericalError& e) {
        config_error(std::string("coefficient ") + kind + ": " + e.what());
    }
    config_error("unknown coefficient kind '" + kind +
                 "' (constant, affine_clipped, sinusoidal, logistic, reciprocal_sinusoid, tabulated)");
}

ExperimentConfig parse_config(const json& doc, const Overrides& overrides,
                              const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    Section root(doc, "config");
    json canonical;

    // model
    {
        static const json kDefaultModel = {{"drift", {{"kind", "constant"}, {"value", 0.0}}},
                                           {"diffusion", {{"kind", "constant"}, {"value", 1.0}}}};
        const json* m = root.raw("model");
        const json& model = m ? *m : kDefaultModel;
        Section s(model, "config.model");
        const json* drift = s.raw("drift");
        const json* diffusion = s.raw("diffusion");
        std::string name = s.string("name", "");
        s.finish();
        json cd;
        json cs;
        const ScalarFunction b = parse_coefficient(drift ? *drift : kDefaultModel["drift"], base_dir, cd);
        const ScalarFunction sigma =
            parse_coefficient(diffusion ? *diffusion : kDefaultModel["diffusion"], base_dir, cs);
        cfg.model = make_model(b, sigma, name);
        cfg.model_spec = {{"drift", cd}, {"diffusion", cs}, {"name", cfg.model.name}};
        canonical["model"] = cfg.model_spec;
    }

    // params
    {
        static const json kEmpty = json::object();
        const json* p = root.raw("params");
        Section s(p ? *p : kEmpty, "config.params");
        cfg.alpha = s.number("alpha", 0.0);
        cfg.beta = s.number("beta", 0.0);
        s.finish();
        cfg.validation = validate_params(cfg.alpha, cfg.beta);
        canonical["params"] = {{"alpha", cfg.alpha}, {"beta", cfg.beta}};
    }

    // sim
    {
        static const json kEmpty = json::object();
        const json* p = root.raw("sim");
        Section s(p ? *p : kEmpty, "config.sim");
        SimConfig& sim = cfg.sim;
        sim.x = s.number("x", sim.x);
        sim.horizon = s.number("horizon", sim.horizon);
        sim.n_steps = s.count("n_steps", sim.n_steps);
        sim.seed = s.count("seed", sim.seed);
        const std::string scheme = s.string("scheme", "per_step");
        sim.picard_outer_iters = s.count("picard_outer_iters", sim.picard_outer_iters);
        sim.fixed_point_tol = s.number("fixed_point_tol", sim.fixed_point_tol);
        s.finish();
        if (scheme == "per_step") {
            sim.scheme = Scheme::PerStep;
        } else if (scheme == "picard") {
            sim.scheme = Scheme::Picard;
        } else {
            config_error("config.sim.scheme must be per_step or picard");
        }
        if (overrides.seed) sim.seed = *overrides.seed;
        if (overrides.steps) sim.n_steps = *overrides.steps;
        require_positive(sim.horizon, "config.sim.horizon");
        require_positive(sim.fixed_point_tol, "config.sim.fixed_point_tol");
        if (sim.n_steps == 0) config_error("config.sim.n_steps must be >= 1");
        canonical["sim"] = {{"x", sim.x},
                            {"horizon", sim.horizon},
                            {"n_steps", sim.n_steps},
                            {"seed", sim.seed},
                            {"scheme", to_string(sim.scheme)},
                            {"picard_outer_iters", sim.picard_outer_iters},
                            {"fixed_point_tol", sim.fixed_point_tol}};
    }

    // analysis
    {
        static const json kEmpty = json::object();
        const json* p = root.raw("analysis");
        Section s(p ? *p : kEmpty, "config.analysis");
        AnalysisSettings& a = cfg.analysis;
        a.n_paths = s.count("n_paths", a.n_paths);
        a.bin_widths = s.numbers("bin_widths", a.bin_widths);
        if (const json* bw = s.raw("bandwidth")) {
            if (bw->is_string() && bw->get<std::string>() == "auto") {
                a.bandwidth.reset();
            } else if (bw->is_number()) {
                a.bandwidth = bw->get<double>();
                require_positive(*a.bandwidth, "config.analysis.bandwidth");
            } else {
                config_error("config.analysis.bandwidth must be \"auto\" or a number");
            }
        }
        a.kde_grid = s.count("kde_grid", a.kde_grid);
        const std::string ref = s.string("reference", "none");
        a.levels = s.count("levels", a.levels);
        a.refinements = s.count("refinements", a.refinements);
        a.refinement_factor = s.count("refinement_factor", a.refinement_factor);
        a.fd_intervals = s.count("fd_intervals", a.fd_intervals);
        a.fd_eps = s.number("fd_eps", a.fd_eps);
        a.h_threshold = s.number("h_threshold", a.h_threshold);
        if (s.has("b_prime_sup")) a.b_prime_sup = s.number("b_prime_sup", 0.0);
        a.t_values = s.numbers("t_values", a.t_values);
        s.finish();

        if (ref == "none") {
            a.reference = ReferenceKind::None;
        } else if (ref == "gaussian") {
            a.reference = ReferenceKind::Gaussian;
        } else if (ref == "singly_perturbed") {
            a.reference = ReferenceKind::SinglyPerturbed;
        } else {
            config_error("config.analysis.reference must be none, gaussian or singly_perturbed");
        }
        if (overrides.paths) a.n_paths = *overrides.paths;
        for (double w : a.bin_widths) require_positive(w, "config.analysis.bin_widths entries");
        for (double t : a.t_values) require_positive(t, "config.analysis.t_values entries");
        require_positive(a.fd_eps, "config.analysis.fd_eps");
        if (a.kde_grid < 2) config_error("config.analysis.kde_grid must be >= 2");
        if (a.levels < 2) config_error("config.analysis.levels must be >= 2");
        if (a.refinement_factor < 2) config_error("config.analysis.refinement_factor must be >= 2");
        if (a.fd_intervals == 0) config_error("config.analysis.fd_intervals must be >= 1");
        if (a.b_prime_sup && *a.b_prime_sup < 0.0) config_error("config.analysis.b_prime_sup must be >= 0");

        json ca = {{"n_paths", a.n_paths},
                   {"bin_widths", a.bin_widths},
                   {"kde_grid", a.kde_grid},
                   {"reference", reference_name(a.reference)},
                   {"levels", a.levels},
                   {"refinements", a.refinements},
                   {"refinement_factor", a.refinement_factor},
                   {"fd_intervals", a.fd_intervals},
                   {"fd_eps", a.fd_eps},
                   {"h_threshold", a.h_threshold},
                   {"t_values", a.t_values}};
        ca["bandwidth"] = a.bandwidth ? json(*a.bandwidth) : json("auto");
        ca["b_prime_sup"] = a.b_prime_sup ? json(*a.b_prime_sup) : json(nullptr);
        canonical["analysis"] = ca;
    }

    // output
    {
        static const json kEmpty = json::object();
        const json* p = root.raw("output");
        Section s(p ? *p : kEmpty, "config.output");
        cfg.out_dir = s.string("dir", cfg.out_dir.string());
        s.finish();
        if (overrides.out) cfg.out_dir = *overrides.out;
        // The output location does not affect results, so it stays out of the fingerprint.
    }
    root.finish();

    cfg.canonical = canonical;
    cfg.fingerprint = fnv1a(canonical.dump());
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "IO_ERROR", "cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error(path.string() + ": " + e.what());
    }
    return parse_config(doc, overrides, path.parent_path());
}

}  // namespace psde::cli

#pragma once

#include "psde/coefficients.hpp"
#include "psde/params.hpp"
#include "psde/simulate.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psde::cli {

using json = nlohmann::json;

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitNumerical = 3,
    kExitIo = 4,
};

/// Error surfaced to the user as {"error": {...}} on stderr.
class CliError : public std::runtime_error {
public:
    CliError(int exit_code, std::string code, const std::string& message)
        : std::runtime_error(message), exit_code_(exit_code), code_(std::move(code)) {}

    int exit_code() const noexcept { return exit_code_; }
    const std::string& code() const noexcept { return code_; }

private:
    int exit_code_;
    std::string code_;
};

enum class ReferenceKind { None, Gaussian, SinglyPerturbed };

struct AnalysisSettings {
    std::size_t n_paths = 1;
    std::vector<double> bin_widths{0.1, 0.01, 0.001};
    std::optional<double> bandwidth;  // nullopt = Silverman's rule
    std::size_t kde_grid = 512;
    ReferenceKind reference = ReferenceKind::None;
    std::size_t levels = 3;            // picard-compare grids: n, 2n, 4n, ...
    std::size_t refinements = 3;       // lamperti-check
    std::size_t refinement_factor = 2;
    std::size_t fd_intervals = 20;
    double fd_eps = 1e-4;
    double h_threshold = 0.0;
    std::optional<double> b_prime_sup;  // overrides the model's declared bound
    std::vector<double> t_values;       // constants; empty = automatic grid
};

struct ExperimentConfig {
    json model_spec;
    CoefficientModel model;
    double alpha = 0.0;
    double beta = 0.0;
    ParamsValidation validation;
    SimConfig sim;
    AnalysisSettings analysis;
    std::filesystem::path out_dir = "psde_out";

    json canonical;                // fully resolved config, defaults included
    std::uint64_t fingerprint = 0;  // FNV-1a of canonical.dump()

    /// The validated parameters, or CliError(exit 2) naming the violation.
    const PerturbationParams& params() const;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<std::string> out;
};

/// Parses a config document. Unknown keys, wrong types and non-positive
/// tolerances are CliError(exit 2). Parameter rejection is recorded in
/// `validation`, not thrown, so `validate` can still report.
ExperimentConfig parse_config(const json& doc, const Overrides& overrides,
                              const std::filesystem::path& base_dir = {});

/// Reads and parses `path`; a missing or unreadable file is CliError(exit 4).
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides);

/// Builds a coefficient from {"kind": ..., ...}.
ScalarFunction parse_coefficient(const json& spec, const std::filesystem::path& base_dir,
                                 json& canonical);

std::string hex64(std::uint64_t v);

}  // namespace psde::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nonstat/ensemble.hpp"

namespace nonstat {

// Thrown on config schema violations; the CLI maps it to exit code 64.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& field_path_message)
        : std::runtime_error(field_path_message) {}
};

struct ExperimentConfig {
    std::string command;
    std::optional<EnsembleSpec> ensemble;
    std::uint64_t seed = 1;
    std::int64_t n = 400;
    std::vector<std::int64_t> n_list;
    std::int64_t samples = 2000;
    double eps = 0.1;
    double eps_prime = 0.1;
    std::int64_t grid_points = 65;
    std::int64_t grid_cells = 0;  // 0 = auto
    double a = 0.5;
    std::vector<double> e_grid;
    std::vector<double> t_grid;
    int depth = 8;
    int levels = 12;
    double e_lo = 98.0, e_hi = 102.0;
    std::vector<std::int64_t> schedule = {200, 1600, 12800};
    std::int64_t site_lo = 1;
    std::string out_dir = "out";

    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;
};

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 2 audit conclusions failed
    std::filesystem::path manifest;
};

// Dispatches to the named pipeline, writes artifacts + manifest atomically.
RunOutcome run_experiment(const ExperimentConfig& config);

// Renders SVG files next to the manifest for every plottable artifact;
// returns the files written.
std::vector<std::filesystem::path> render_plots(const std::filesystem::path& manifest_path);

}  // namespace nonstat

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nonstat/io.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/pipelines.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int thread_cap_from_env() {
    const char* env = std::getenv("NONSTAT_THREADS");
    if (!env) return 0;
    return std::atoi(env);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonstationary SL(2,R) cocycle and Anderson model toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string command_override;
    std::string out_override;
    std::int64_t seed_override = -1;
    std::int64_t n_override = -1;
    std::int64_t samples_override = -1;
    int threads = thread_cap_from_env();

    auto* run_cmd = app.add_subcommand("run", "run an experiment described by a JSON config");
    run_cmd->add_option("-c,--config", config_path, "config JSON file")->required();
    run_cmd->add_option("--command", command_override, "override config command");
    run_cmd->add_option("--seed", seed_override, "override seed");
    run_cmd->add_option("--n", n_override, "override n");
    run_cmd->add_option("--samples", samples_override, "override sample count");
    run_cmd->add_option("--out", out_override, "override output directory");
    run_cmd->add_option("--threads", threads, "worker cap (0 = default)");

    std::string manifest_path;
    auto* plot_cmd = app.add_subcommand("plot", "render SVG plots for a finished run");
    plot_cmd->add_option("-m,--manifest", manifest_path, "manifest.json path")->required();

    auto* verify_cmd = app.add_subcommand("verify", "re-hash artifacts listed in a manifest");
    verify_cmd->add_option("-m,--manifest", manifest_path, "manifest.json path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            nonstat::set_max_threads(threads);
            nonstat::ExperimentConfig config;
            try {
                config = nonstat::ExperimentConfig::from_json_text(read_file(config_path));
                if (!command_override.empty()) config.command = command_override;
                if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
                if (n_override >= 0) config.n = n_override;
                if (samples_override >= 0) config.samples = samples_override;
                if (!out_override.empty()) config.out_dir = out_override;
            } catch (const nonstat::SchemaError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 64;
            }
            const auto outcome = nonstat::run_experiment(config);
            std::cout << "manifest: " << outcome.manifest.string() << "\n";
            return outcome.exit_code;
        }
        if (plot_cmd->parsed()) {
            const auto files = nonstat::render_plots(manifest_path);
            for (const auto& f : files) std::cout << f.string() << "\n";
            return 0;
        }
        if (verify_cmd->parsed()) {
            const auto failures = nonstat::verify_manifest(manifest_path);
            if (failures.empty()) {
                std::cout << "all artifacts verified\n";
                return 0;
            }
            for (const auto& f : failures) std::cerr << "hash mismatch: " << f << "\n";
            return 1;
        }
    } catch (const nonstat::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "nonstat/io.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/pipelines.hpp"

using namespace nonstat;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("nonstat_test_" + tag);
    fs::remove_all(dir);
    return dir;
}

std::string diag_growth_config(const std::string& out) {
    return R"({
      "command": "growth",
      "ensemble": {"family": "rotation_diagonal", "J": [0.0, 6.283185307179586], "k": 1,
                   "laws": {"alpha_random": false, "param_mode": "none"}},
      "n_list": [10], "samples": 8, "grid_points": 3, "seed": 1,
      "out": ")" + out + R"("})";
}

}  // namespace

TEST_CASE("schema violations carry field paths") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{}"), SchemaError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"command":"dance"})"), SchemaError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"command":"growth"})"), SchemaError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"command":"growth","ensemble":{"family":"schrodinger","J":[0,1]},"samples":1})"),
        SchemaError);
    try {
        ExperimentConfig::from_json_text(R"({"command":"growth"})");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("ensemble") != std::string::npos);
    }
}

TEST_CASE("growth run on deterministic steps writes exact values") {
    const fs::path out = temp_dir("growth");
    const auto cfg = ExperimentConfig::from_json_text(diag_growth_config(out.string()));
    const RunOutcome outcome = run_experiment(cfg);
    CHECK(outcome.exit_code == 0);

    const auto manifest = nlohmann::json::parse(slurp(outcome.manifest));
    CHECK(manifest.at("results").at("min_rate").get<double>() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // log of the exact product norm 2^10 in the csv.
    const std::string csv = slurp(out / "growth.csv");
    CHECK(csv.find(format_double(std::log(1024.0))) != std::string::npos);

    CHECK(verify_manifest(outcome.manifest).empty());

    // Tamper and re-verify.
    std::ofstream(out / "growth.csv", std::ios::app) << "tampered\n";
    CHECK(!verify_manifest(outcome.manifest).empty());
}

TEST_CASE("manifests are byte-identical across reruns and thread caps") {
    const fs::path out1 = temp_dir("det1"), out2 = temp_dir("det2");
    auto cfg1 = ExperimentConfig::from_json_text(diag_growth_config(out1.string()));
    auto cfg2 = ExperimentConfig::from_json_text(diag_growth_config(out2.string()));

    set_max_threads(1);
    const RunOutcome r1 = run_experiment(cfg1);
    set_max_threads(8);
    const RunOutcome r2 = run_experiment(cfg2);
    set_max_threads(0);

    auto m1 = nlohmann::json::parse(slurp(r1.manifest));
    auto m2 = nlohmann::json::parse(slurp(r2.manifest));
    // Same hashes for every artifact (the config echoes differ in out dir).
    CHECK(m1.at("outputs") == m2.at("outputs"));
}

TEST_CASE("spectrum run reproduces the free-chain eigenvalues") {
    const fs::path out = temp_dir("spectrum");
    const std::string cfg_text = R"({
      "command": "spectrum",
      "ensemble": {"family": "schrodinger", "J": [-3.0, 4.0], "k": 2,
                   "laws": {"base": {"kind": "finite_atoms", "values": [0.0, 1e-12],
                            "weights": [0.5, 0.5]}}},
      "n": 5, "seed": 3, "out": ")" + out.string() + R"("})";
    const RunOutcome outcome = run_experiment(ExperimentConfig::from_json_text(cfg_text));
    CHECK(outcome.exit_code == 0);
    const auto manifest = nlohmann::json::parse(slurp(outcome.manifest));
    CHECK(manifest.at("results").at("count").get<int>() == 5);
    // Eigenvalues {2 cos(k pi/6)} = {±sqrt(3), ±1, 0}.
    CHECK(manifest.at("results").at("e_max").get<double>() ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK(manifest.at("results").at("e_min").get<double>() ==
          doctest::Approx(-std::sqrt(3.0)).epsilon(1e-9));

    // The binary artifact round-trips with the documented header.
    const std::string bin = slurp(out / "eigenvectors.nsc");
    REQUIRE(bin.size() == 16 + 5 * 5 * 8);
    CHECK(bin.substr(0, 4) == "NSC1");
}

TEST_CASE("plots are rendered deterministically") {
    const fs::path out = temp_dir("plots");
    const auto cfg = ExperimentConfig::from_json_text(diag_growth_config(out.string()));
    const RunOutcome outcome = run_experiment(cfg);
    const auto files1 = render_plots(outcome.manifest);
    REQUIRE(!files1.empty());
    const std::string svg1 = slurp(files1[0]);
    CHECK(svg1.find("<svg") != std::string::npos);
    const auto files2 = render_plots(outcome.manifest);
    CHECK(slurp(files2[0]) == svg1);
}

TEST_CASE("encode_matrix layout") {
    const std::vector<double> vals = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const std::string bin = encode_matrix(vals, 2, 3);
    REQUIRE(bin.size() == 16 + 48);
    CHECK(bin.substr(0, 4) == "NSC1");
    // rows at offset 8, cols at offset 12, little endian.
    CHECK(static_cast<unsigned char>(bin[8]) == 2);
    CHECK(static_cast<unsigned char>(bin[12]) == 3);
    double first;
    std::memcpy(&first, bin.data() + 16, 8);
    CHECK(first == 1.0);
    CHECK_THROWS(encode_matrix(vals, 3, 3));
}

TEST_CASE("csv formatting is locale independent") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-3.25) == "-3.25");
    CHECK(format_double(1e100) == "1e+100");
}

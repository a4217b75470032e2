#include "nonstat/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "nonstat/cantor.hpp"
#include "nonstat/classifier.hpp"
#include "nonstat/cocycle.hpp"
#include "nonstat/counterexample.hpp"
#include "nonstat/io.hpp"
#include "nonstat/spectral.hpp"
#include "nonstat/stats.hpp"
#include "nonstat/svg.hpp"

namespace nonstat {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"growth",   "tails",   "classify", "audit",
                                            "spectrum", "localize", "dynloc",  "shnol",
                                            "essential", "cantor",  "counterexample"};

template <class T>
T get_field(const json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw SchemaError(key + ": wrong type");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config: not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("command")) throw SchemaError("command: required");
    cfg.command = j.at("command").get<std::string>();
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
        throw SchemaError("command: unknown value '" + cfg.command + "'");
    if (j.contains("ensemble")) {
        try {
            cfg.ensemble = EnsembleSpec::from_json(j.at("ensemble").dump());
        } catch (const std::exception& e) {
            throw SchemaError(std::string("ensemble: ") + e.what());
        }
    }
    cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
    cfg.n = get_field<std::int64_t>(j, "n", cfg.n);
    cfg.n_list = get_field<std::vector<std::int64_t>>(j, "n_list", cfg.n_list);
    cfg.samples = get_field<std::int64_t>(j, "samples", cfg.samples);
    cfg.eps = get_field<double>(j, "eps", cfg.eps);
    cfg.eps_prime = get_field<double>(j, "eps_prime", cfg.eps_prime);
    cfg.grid_points = get_field<std::int64_t>(j, "grid_points", cfg.grid_points);
    cfg.grid_cells = get_field<std::int64_t>(j, "grid_cells", cfg.grid_cells);
    cfg.a = get_field<double>(j, "a", cfg.a);
    cfg.e_grid = get_field<std::vector<double>>(j, "e_grid", cfg.e_grid);
    cfg.t_grid = get_field<std::vector<double>>(j, "t_grid", cfg.t_grid);
    cfg.depth = get_field<int>(j, "depth", cfg.depth);
    cfg.levels = get_field<int>(j, "levels", cfg.levels);
    cfg.e_lo = get_field<double>(j, "e_lo", cfg.e_lo);
    cfg.e_hi = get_field<double>(j, "e_hi", cfg.e_hi);
    cfg.schedule = get_field<std::vector<std::int64_t>>(j, "schedule", cfg.schedule);
    cfg.site_lo = get_field<std::int64_t>(j, "site_lo", cfg.site_lo);
    cfg.out_dir = get_field<std::string>(j, "out", cfg.out_dir);

    if (cfg.n < 1) throw SchemaError("n: must be >= 1");
    if (cfg.samples < 2) throw SchemaError("samples: must be >= 2");
    if (cfg.eps <= 0) throw SchemaError("eps: must be positive");
    if (!(cfg.eps_prime > 0 && cfg.eps_prime < 0.5))
        throw SchemaError("eps_prime: must lie in (0, 1/2)");
    if (cfg.grid_points < 2) throw SchemaError("grid_points: must be >= 2");
    if (cfg.depth < 0 || cfg.depth > 40) throw SchemaError("depth: must lie in [0, 40]");
    const bool needs_ensemble = cfg.command != "cantor" && cfg.command != "counterexample";
    if (needs_ensemble && !cfg.ensemble) throw SchemaError("ensemble: required");
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["command"] = command;
    if (ensemble) j["ensemble"] = json::parse(ensemble->to_json());
    j["seed"] = seed;
    j["n"] = n;
    if (!n_list.empty()) j["n_list"] = n_list;
    j["samples"] = samples;
    j["eps"] = eps;
    j["eps_prime"] = eps_prime;
    j["grid_points"] = grid_points;
    j["grid_cells"] = grid_cells;
    j["a"] = a;
    if (!e_grid.empty()) j["e_grid"] = e_grid;
    if (!t_grid.empty()) j["t_grid"] = t_grid;
    j["depth"] = depth;
    j["levels"] = levels;
    j["e_lo"] = e_lo;
    j["e_hi"] = e_hi;
    j["schedule"] = schedule;
    j["site_lo"] = site_lo;
    j["out"] = out_dir;
    return j.dump(2);
}

namespace {

std::vector<double> uniform_grid(double lo, double hi, std::int64_t points) {
    std::vector<double> g(points);
    for (std::int64_t i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

std::vector<std::string> names(std::initializer_list<const char*> list) {
    return {list.begin(), list.end()};
}

int pipeline_growth(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const auto& spec = *cfg.ensemble;
    const auto grid = uniform_grid(spec.j_lo, spec.j_hi, cfg.grid_points);
    std::vector<std::int64_t> n_list = cfg.n_list.empty()
                                           ? std::vector<std::int64_t>{cfg.n}
                                           : cfg.n_list;
    const GrowthProfile prof = estimate_L(spec, grid, n_list, cfg.samples, cfg.seed);

    CsvWriter csv;
    const auto hdr = names({"n", "a", "L_hat", "stderr"});
    csv.header(hdr);
    for (std::size_t ni = 0; ni < n_list.size(); ++ni)
        for (std::size_t ai = 0; ai < grid.size(); ++ai)
            csv.row(std::vector<double>{static_cast<double>(n_list[ni]), grid[ai],
                                        prof.at(ni, ai), prof.se(ni, ai)});
    sink.add("growth.csv", csv.buffer);

    json meta;
    meta["spec_hash"] = hash_hex(fnv1a64(spec.to_json()));
    meta["seed_block"] = cfg.seed;
    meta["samples"] = cfg.samples;
    sink.add("growth_meta.json", meta.dump(2) + "\n");

    double min_rate = 1e300;
    for (std::size_t ai = 0; ai < grid.size(); ++ai)
        min_rate = std::fmin(min_rate, prof.at(n_list.size() - 1, ai) /
                                           static_cast<double>(n_list.back()));
    results["min_rate"] = min_rate;

    const EquicontinuityReport eq = equicontinuity_modulus(prof);
    CsvWriter eq_csv;
    eq_csv.header(names({"n", "modulus"}));
    for (std::size_t i = 0; i < eq.n_list.size(); ++i)
        eq_csv.row(std::vector<double>{static_cast<double>(eq.n_list[i]), eq.modulus[i]});
    sink.add("equicontinuity.csv", eq_csv.buffer);
    results["modulus_trend_slope"] = eq.trend.slope;
    results["modulus_trend_slope_se"] = eq.trend.slope_se;
    results["modulus_flagged"] = eq.flagged;
    return 0;
}

int pipeline_tails(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    std::vector<std::int64_t> n_list =
        cfg.n_list.empty() ? std::vector<std::int64_t>{50, 100, 200, 400} : cfg.n_list;
    const TailReport rep = ld_tail(*cfg.ensemble, cfg.a, n_list, cfg.eps, cfg.samples, cfg.seed);
    CsvWriter csv;
    csv.header(names({"n", "p_hat"}));
    for (std::size_t i = 0; i < rep.n_list.size(); ++i)
        csv.row(std::vector<double>{static_cast<double>(rep.n_list[i]), rep.p_hat[i]});
    sink.add("tails.csv", csv.buffer);
    results["delta_hat"] = rep.delta_hat;
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.p_hat.size(); ++i)
        if (!(rep.p_hat[i] < rep.p_hat[i - 1] ||
              (rep.p_hat[i] == 0.0 && rep.p_hat[i - 1] > 0.0)))
            decreasing = false;
    results["strictly_decreasing"] = decreasing;
    return 0;
}

const char* kind_name(IntervalKind k) {
    switch (k) {
        case IntervalKind::Small: return "small";
        case IntervalKind::OpinionChanger: return "opinion_changer";
        case IntervalKind::Jump: return "jump";
        case IntervalKind::Anomaly: return "anomaly";
    }
    return "?";
}

int pipeline_classify(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const auto& spec = *cfg.ensemble;
    const OmegaStream omega{cfg.seed};
    std::int64_t cells = cfg.grid_cells;
    if (cells <= 0) cells = ParamGrid::default_cells(cfg.n);
    const ParamGrid grid{spec.j_lo, spec.j_hi, cells};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, cfg.n);
    const Classification cls = classify_intervals(sweep, cfg.eps_prime);

    CsvWriter csv;
    csv.header(names({"i", "kind", "m0", "mbar", "a_cancel", "max_len"}));
    for (const auto& r : cls.reports) {
        csv.raw_row(std::to_string(r.i) + "," + kind_name(r.kind) + "," + std::to_string(r.m0) +
                    "," + std::to_string(r.mbar) + "," +
                    (std::isnan(r.a_cancel) ? "" : format_double(r.a_cancel)) + "," +
                    format_double(r.max_len));
    }
    sink.add("intervals.csv", csv.buffer);
    sink.add("sweep.nsc", encode_matrix(sweep.values, static_cast<std::uint32_t>(cfg.n + 1),
                                        static_cast<std::uint32_t>(cells + 1)));
    CsvWriter summary;
    summary.header(names({"m", "rotation_count"}));
    for (std::int64_t m = 0; m <= cfg.n; ++m)
        summary.row(std::vector<double>{static_cast<double>(m),
                                        rotation_count(sweep, 0, cells, m)});
    sink.add("sweep_summary.csv", summary.buffer);

    results["cells"] = cells;
    results["jumps"] = cls.jumps;
    results["anomalies"] = cls.anomalies;
    results["rotation_total"] = rotation_count(sweep, 0, cells, cfg.n);
    return 0;
}

json conclusion_json(const ConclusionResult& c) {
    return {{"pass", c.pass}, {"worst_margin", c.worst}, {"checks", c.checks}};
}

int pipeline_audit(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    AuditParams params;
    params.n = cfg.n;
    params.eps = cfg.eps;
    params.eps_prime = cfg.eps_prime;
    params.grid_cells = cfg.grid_cells;
    params.seed_block = cfg.seed;
    const OmegaStream omega{cfg.seed};
    const MainTheoremAudit audit = audit_main_theorem(*cfg.ensemble, omega, params);

    CsvWriter csv;
    csv.header(names({"i", "kind", "m0", "mbar", "a_cancel", "max_len"}));
    for (const auto& r : audit.reports)
        csv.raw_row(std::to_string(r.i) + "," + kind_name(r.kind) + "," + std::to_string(r.m0) +
                    "," + std::to_string(r.mbar) + "," +
                    (std::isnan(r.a_cancel) ? "" : format_double(r.a_cancel)) + "," +
                    format_double(r.max_len));
    sink.add("intervals.csv", csv.buffer);

    results["eps"] = audit.eps;
    results["grid_cells"] = audit.grid_cells;
    results["jump_count"] = audit.jump_count;
    results["rotation_total"] = audit.r_total;
    results["anomalies"] = audit.anomalies;
    results["conclusion_I"] = conclusion_json(audit.growth_typical);
    results["conclusion_II"] = conclusion_json(audit.growth_exceptional);
    results["conclusion_IV"] = conclusion_json(audit.cancellation);
    results["conclusion_V"] = conclusion_json(audit.distribution);
    results["all_pass"] = audit.all_pass();
    return audit.all_pass() ? 0 : 2;
}

int pipeline_spectrum(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const OmegaStream omega{cfg.seed};
    const TridiagOperator op = build_operator(*cfg.ensemble, omega, cfg.site_lo, cfg.n);
    const auto pairs = eigensolve(op);
    CsvWriter csv;
    csv.header(names({"k", "E"}));
    for (std::size_t k = 0; k < pairs.size(); ++k)
        csv.row(std::vector<double>{static_cast<double>(k + 1), pairs[k].e});
    sink.add("spectrum.csv", csv.buffer);

    std::vector<double> flat;
    flat.reserve(pairs.size() * op.size());
    for (const auto& p : pairs) flat.insert(flat.end(), p.phi.begin(), p.phi.end());
    sink.add("eigenvectors.nsc",
             encode_matrix(flat, static_cast<std::uint32_t>(pairs.size()),
                           static_cast<std::uint32_t>(op.size())));
    CsvWriter vcsv;
    vcsv.header(names({"site", "V"}));
    for (std::int64_t i = 0; i < op.size(); ++i)
        vcsv.row(std::vector<double>{static_cast<double>(op.first_site + i), op.diag[i]});
    sink.add("potential.csv", vcsv.buffer);
    results["count"] = pairs.size();
    results["e_min"] = pairs.front().e;
    results["e_max"] = pairs.back().e;
    return 0;
}

int pipeline_localize(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const OmegaStream omega{cfg.seed};
    const TridiagOperator op = build_operator(*cfg.ensemble, omega, cfg.site_lo, cfg.n);
    const auto pairs = eigensolve(op);
    const double xi = cfg.eps;  // reuse: localization runs take eps as xi
    const SuleFit fit = sule_fit(pairs, xi);
    CsvWriter csv;
    csv.header(names({"j", "E", "center", "residual"}));
    for (std::size_t j = 0; j < pairs.size(); ++j)
        csv.row(std::vector<double>{static_cast<double>(j + 1), pairs[j].e,
                                    static_cast<double>(pairs[j].center), fit.residuals[j]});
    sink.add("sule.csv", csv.buffer);
    std::vector<double> flat;
    for (const auto& p : pairs) flat.insert(flat.end(), p.phi.begin(), p.phi.end());
    sink.add("eigenvectors.nsc",
             encode_matrix(flat, static_cast<std::uint32_t>(pairs.size()),
                           static_cast<std::uint32_t>(op.size())));
    results["xi"] = xi;
    results["alpha_hat"] = fit.alpha_hat;
    results["c_hat"] = fit.c_hat;
    return 0;
}

int pipeline_dynloc(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const OmegaStream omega{cfg.seed};
    const TridiagOperator op = build_operator(*cfg.ensemble, omega, cfg.site_lo, cfg.n);
    const auto pairs = eigensolve(op);
    const std::int64_t center = op.size() / 2;
    const std::int64_t d_max = std::min<std::int64_t>(op.size() - center - 1, op.size() / 3);
    CsvWriter csv;
    csv.header(names({"d", "Q", "evolution_max"}));
    const auto t_grid = cfg.t_grid.empty() ? default_t_grid() : cfg.t_grid;
    for (std::int64_t d = 0; d <= d_max; d += std::max<std::int64_t>(1, d_max / 64)) {
        const double q = eigenfunction_correlator(pairs, center, center + d);
        const double ev = time_evolution_probe(pairs, center, center + d, t_grid);
        csv.row(std::vector<double>{static_cast<double>(d), q, ev});
    }
    sink.add("correlator.csv", csv.buffer);
    const LineFit decay = correlator_decay(pairs, center, d_max);
    results["slope"] = decay.slope;
    results["slope_se"] = decay.slope_se;
    return 0;
}

int pipeline_shnol(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const OmegaStream omega{cfg.seed};
    const ShnolResult res = shnol_shooting(*cfg.ensemble, omega, cfg.a, cfg.n);
    CsvWriter csv;
    csv.header(names({"m", "log_norm"}));
    for (std::size_t m = 0; m < res.log_norms.size(); ++m)
        csv.row(std::vector<double>{static_cast<double>(m), res.log_norms[m]});
    sink.add("shooting.csv", csv.buffer);
    results["E"] = cfg.a;
    results["decay_rate_forward"] = res.decay_rate_forward;
    results["min_index"] = res.min_index;
    results["shape"] = res.shape == ShnolShape::Line
                           ? "line"
                           : (res.shape == ShnolShape::CurvedV ? "curved_v" : "flat");
    return 0;
}

int pipeline_essential(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    if (cfg.e_grid.size() < 2) throw SchemaError("e_grid: need at least 2 points");
    std::vector<std::int64_t> n_list =
        cfg.n_list.empty() ? std::vector<std::int64_t>{400, 800, 1600, 3200} : cfg.n_list;
    const OmegaStream omega{cfg.seed};
    const auto verdicts = essential_set_probe(*cfg.ensemble, omega, cfg.e_grid, n_list);
    CsvWriter csv;
    std::vector<std::string> hdr = {"e_lo", "e_hi", "verdict"};
    for (auto n : n_list) hdr.push_back("R_n" + std::to_string(n));
    csv.header(hdr);
    std::int64_t growing = 0;
    for (const auto& v : verdicts) {
        std::string line = format_double(v.e_lo) + "," + format_double(v.e_hi) + "," +
                           (v.growing ? "growing" : "bounded");
        for (double r : v.r_values) line += "," + format_double(r);
        csv.raw_row(line);
        if (v.growing) ++growing;
    }
    sink.add("essential.csv", csv.buffer);
    results["cells"] = verdicts.size();
    results["growing"] = growing;
    return 0;
}

int pipeline_cantor(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    const CantorPair pair = build_cantor_pair(0.5 * (cfg.e_lo + cfg.e_hi));
    results["k_dim"] = box_dimension_estimate(pair.k_side, std::min(cfg.depth, 8));
    results["c_dim"] = box_dimension_estimate(pair.c_side, std::min(cfg.depth, 8));
    results["k_max_derivative"] = pair.k_side.max_derivative;

    const IntersectionResult inter =
        intersection_parameters(cfg.e_lo, cfg.e_hi, cfg.depth, cfg.levels);
    CsvWriter csv;
    csv.header(names({"E_lo", "E_hi", "depth"}));
    for (const auto& c : inter.cells)
        csv.row(std::vector<double>{c.e_lo, c.e_hi, static_cast<double>(cfg.levels)});
    sink.add("survivors.csv", csv.buffer);
    CsvWriter lv;
    lv.header(names({"level", "count", "width"}));
    for (std::size_t l = 0; l < inter.level_counts.size(); ++l)
        lv.row(std::vector<double>{static_cast<double>(l),
                                   static_cast<double>(inter.level_counts[l]),
                                   inter.level_widths[l]});
    sink.add("levels.csv", lv.buffer);
    results["survivors"] = inter.cells.size();
    results["dim_estimate"] = inter.dim_estimate;
    results["k_motion_sign"] = inter.k_motion_sign;
    results["c_motion_sign"] = inter.c_motion_sign;
    results["budget_exhausted"] = inter.budget_exhausted;
    return 0;
}

int pipeline_counterexample(const ExperimentConfig& cfg, ArtifactSink& sink, json& results) {
    ScheduleB schedule;
    schedule.n_list = cfg.schedule;
    const CounterexampleResult res = run_counterexample(schedule, cfg.seed, cfg.eps);

    json stages = json::array();
    CsvWriter csv;
    csv.header(names({"stage", "m", "log_norm_over_m"}));
    for (std::size_t s = 0; s < res.stages.size(); ++s) {
        const auto& st = res.stages[s];
        json js;
        js["n"] = st.n;
        js["found"] = st.found;
        js["jump_cell"] = st.jump_cell;
        js["m0"] = st.m0;
        js["mbar"] = st.mbar;
        js["mbar_prime"] = st.mbar_prime;
        js["a_cancel"] = st.a_cancel;
        js["axis_gap"] = st.axis_gap;
        js["deep_bits"] = st.deep_bits;
        js["gap_at_end"] = st.gap_at_end;
        js["plateau_gap"] = st.plateau_gap;
        js["widened_window"] = st.widened_window;
        js["grid_cells"] = st.grid_cells;
        stages.push_back(js);
        for (std::size_t m = 0; m < st.trace.size(); ++m)
            csv.row(std::vector<double>{static_cast<double>(s + 1), static_cast<double>(m + 1),
                                        st.trace[m] / static_cast<double>(m + 1)});
    }
    sink.add("counterexample_trace.csv", csv.buffer);
    if (!res.stages.empty() && !res.stages.back().trace.empty()) {
        const auto& tr = res.stages.back().trace;
        sink.add("counterexample_trace.nsc",
                 encode_matrix(tr, 1, static_cast<std::uint32_t>(tr.size())));
    }
    results["success"] = res.success;
    results["failed_stage"] = res.failed_stage;
    results["a_found"] = res.a_found;
    results["gap"] = res.gap;
    results["stages"] = stages;
    return 0;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
    ArtifactSink sink(config.out_dir, config.to_json());
    json results;
    int code = 0;
    if (config.command == "growth") code = pipeline_growth(config, sink, results);
    else if (config.command == "tails") code = pipeline_tails(config, sink, results);
    else if (config.command == "classify") code = pipeline_classify(config, sink, results);
    else if (config.command == "audit") code = pipeline_audit(config, sink, results);
    else if (config.command == "spectrum") code = pipeline_spectrum(config, sink, results);
    else if (config.command == "localize") code = pipeline_localize(config, sink, results);
    else if (config.command == "dynloc") code = pipeline_dynloc(config, sink, results);
    else if (config.command == "shnol") code = pipeline_shnol(config, sink, results);
    else if (config.command == "essential") code = pipeline_essential(config, sink, results);
    else if (config.command == "cantor") code = pipeline_cantor(config, sink, results);
    else if (config.command == "counterexample")
        code = pipeline_counterexample(config, sink, results);
    else
        throw SchemaError("command: unknown value '" + config.command + "'");

    RunOutcome outcome;
    outcome.exit_code = code;
    outcome.manifest = sink.finalize(results.dump());
    return outcome;
}

namespace {

// Minimal CSV reader for the plot renderer (the files are our own).
std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::string line;
    std::vector<std::vector<double>> cols;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {  // header
            first = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (cols.size() <= c) cols.resize(c + 1);
            try {
                cols[c].push_back(std::stod(cell));
            } catch (...) {
                cols[c].push_back(std::numeric_limits<double>::quiet_NaN());
            }
            ++c;
        }
    }
    return cols;
}

void autoscale(SvgPlot& plot, std::span<const double> xs, std::span<const double> ys) {
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (double x : xs)
        if (std::isfinite(x)) {
            x_lo = std::fmin(x_lo, x);
            x_hi = std::fmax(x_hi, x);
        }
    for (double y : ys)
        if (std::isfinite(y)) {
            y_lo = std::fmin(y_lo, y);
            y_hi = std::fmax(y_hi, y);
        }
    if (x_lo > x_hi) {
        x_lo = 0;
        x_hi = 1;
    }
    if (y_lo > y_hi) {
        y_lo = 0;
        y_hi = 1;
    }
    const double pad = 0.05 * (y_hi - y_lo + 1e-12);
    plot.set_range(x_lo, x_hi, y_lo - pad, y_hi + pad);
}

}  // namespace

std::vector<std::filesystem::path> render_plots(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open " + manifest_path.string());
    const json manifest = json::parse(in);
    const std::string command = manifest.at("config").at("command").get<std::string>();
    const auto dir = manifest_path.parent_path();
    std::vector<std::filesystem::path> written;

    auto save = [&](const std::string& name, const SvgPlot& plot) {
        const auto path = dir / name;
        write_file_atomic(path, plot.render());
        written.push_back(path);
    };

    if (command == "growth") {
        const auto cols = read_csv_columns(dir / "growth.csv");
        if (cols.size() >= 3 && !cols[0].empty()) {
            SvgPlot plot("growth profile", "a", "L/n");
            std::vector<double> y(cols[2].size());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = cols[2][i] / cols[0][i];
            autoscale(plot, cols[1], y);
            // One polyline per distinct n, in file order.
            std::size_t start = 0;
            for (std::size_t i = 1; i <= cols[0].size(); ++i) {
                if (i == cols[0].size() || cols[0][i] != cols[0][start]) {
                    plot.polyline(std::span(cols[1]).subspan(start, i - start),
                                  std::span(y).subspan(start, i - start), "steelblue");
                    start = i;
                }
            }
            save("growth.svg", plot);
        }
    } else if (command == "tails") {
        const auto cols = read_csv_columns(dir / "tails.csv");
        if (cols.size() >= 2) {
            SvgPlot plot("large-deviation tail", "n", "log10 p");
            std::vector<double> y;
            std::vector<double> x;
            for (std::size_t i = 0; i < cols[1].size(); ++i)
                if (cols[1][i] > 0) {
                    x.push_back(cols[0][i]);
                    y.push_back(std::log10(cols[1][i]));
                }
            autoscale(plot, x, y);
            plot.polyline(x, y, "firebrick", 1.5);
            save("tails.svg", plot);
        }
    } else if (command == "classify") {
        const auto cols = read_csv_columns(dir / "sweep_summary.csv");
        if (cols.size() >= 2) {
            SvgPlot plot("rotation count growth", "m", "R(J)");
            autoscale(plot, cols[0], cols[1]);
            plot.polyline(cols[0], cols[1], "steelblue", 1.5);
            save("rotation.svg", plot);
        }
    } else if (command == "spectrum") {
        const auto cols = read_csv_columns(dir / "spectrum.csv");
        if (cols.size() >= 2) {
            SvgPlot plot("eigenvalue staircase", "k", "E_k");
            autoscale(plot, cols[0], cols[1]);
            plot.polyline(cols[0], cols[1], "steelblue", 1.0);
            save("spectrum.svg", plot);
        }
    } else if (command == "dynloc") {
        const auto cols = read_csv_columns(dir / "correlator.csv");
        if (cols.size() >= 2) {
            SvgPlot plot("correlator decay", "|q-m|", "log10 Q");
            std::vector<double> x, y;
            for (std::size_t i = 0; i < cols[1].size(); ++i)
                if (cols[1][i] > 0) {
                    x.push_back(cols[0][i]);
                    y.push_back(std::log10(cols[1][i]));
                }
            autoscale(plot, x, y);
            plot.polyline(x, y, "darkgreen", 1.5);
            save("correlator.svg", plot);
        }
    } else if (command == "shnol") {
        const auto cols = read_csv_columns(dir / "shooting.csv");
        if (cols.size() >= 2) {
            SvgPlot plot("shooting profile", "m", "log |v_m|");
            autoscale(plot, cols[0], cols[1]);
            plot.polyline(cols[0], cols[1], "steelblue", 1.0);
            save("shooting.svg", plot);
        }
    } else if (command == "essential") {
        const auto cols = read_csv_columns(dir / "essential.csv");
        if (cols.size() >= 4) {
            SvgPlot plot("rotation count by energy", "E", "R at n_max");
            const auto& r_last = cols.back();
            std::vector<double> mids(cols[0].size());
            for (std::size_t i = 0; i < mids.size(); ++i)
                mids[i] = 0.5 * (cols[0][i] + cols[1][i]);
            autoscale(plot, mids, r_last);
            plot.polyline(mids, r_last, "steelblue", 1.5);
            save("essential.svg", plot);
        }
    } else if (command == "cantor") {
        const auto cols = read_csv_columns(dir / "survivors.csv");
        SvgPlot plot("survivor cells", "E", "");
        plot.set_range(98, 102, 0, 1);
        if (cols.size() >= 2)
            for (std::size_t i = 0; i < cols[0].size(); ++i)
                plot.rect(cols[0][i], cols[1][i], 0.4, 0.6, "black");
        save("survivors.svg", plot);
    } else if (command == "counterexample") {
        const auto cols = read_csv_columns(dir / "counterexample_trace.csv");
        if (cols.size() >= 3) {
            SvgPlot plot("slope at the cancellation parameter", "m", "log|T_m| / m");
            autoscale(plot, cols[1], cols[2]);
            const double n2 = averaged_expansion(2.0), n100 = averaged_expansion(100.0);
            std::size_t start = 0;
            for (std::size_t i = 1; i <= cols[0].size(); ++i) {
                if (i == cols[0].size() || cols[0][i] != cols[0][start]) {
                    plot.polyline(std::span(cols[1]).subspan(start, i - start),
                                  std::span(cols[2]).subspan(start, i - start), "steelblue");
                    start = i;
                }
            }
            plot.hline((2.0 * n2 + n100) / 3.0, "firebrick");   // expected plateau
            plot.hline(0.5 * (n2 + n100), "gray");              // mean slope
            save("counterexample.svg", plot);
        }
    }
    return written;
}

}  // namespace nonstat

#include "cli.hpp"

#include "hawkes_mf/analysis.hpp"
#include "hawkes_mf/config.hpp"
#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/fluctuations.hpp"
#include "hawkes_mf/io.hpp"
#include "hawkes_mf/network.hpp"
#include "hawkes_mf/parallel.hpp"
#include "hawkes_mf/random.hpp"
#include "hawkes_mf/simulator.hpp"
#include "hawkes_mf/volterra.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace hawkes_mf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tags for seeds derived by the command-line runner itself.
constexpr std::uint32_t kSimulateNetworkTag = 100;
constexpr std::uint32_t kSimulateProcessTag = 101;
constexpr std::uint32_t kFluctuationTag = 102;

struct Common {
    std::string config;
    std::string out;
    std::optional<std::size_t> replicates;
    std::optional<std::size_t> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
};

void add_common(CLI::App* app, Common& c, bool with_replicates) {
    app->add_option("--config", c.config, "JSON config file or a run manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "output directory (or file for meanfield)");
    if (with_replicates) {
        app->add_option("--replicates", c.replicates, "override run.replicates");
    }
    app->add_option("--jobs", c.jobs, "worker threads (default: HAWKES_MF_JOBS or all cores)");
    app->add_option("--seed", c.seed, "override run.master_seed");
    app->add_option("--backend", c.backend, "thinning or timechange");
}

ExperimentConfig resolve(const Common& c) {
    auto config = load_config(c.config);
    if (c.replicates) {
        config.run.replicates = *c.replicates;
    }
    if (c.seed) {
        config.run.master_seed = *c.seed;
    }
    if (c.backend) {
        try {
            config.run.backend = parse_backend(*c.backend);
        } catch (const ParameterError& e) {
            throw ConfigError("--backend", e.what());
        }
    }
    if (!c.out.empty()) {
        config.output.dir = c.out;
    }
    if (config.output.dir.empty()) {
        throw ConfigError("output.dir", "no output location; pass --out or set output.dir");
    }
    return config;
}

std::size_t jobs_of(const Common& c) { return c.jobs && *c.jobs > 0 ? *c.jobs : default_jobs(); }

json manifest(const std::string& command, const ExperimentConfig& config) {
    return {{"schema_version", kSchemaVersion},
            {"tool", "hawkes_mf"},
            {"version", HAWKES_MF_VERSION},
            {"command", command},
            {"config", resolved_json(config)}};
}

void write_json(const fs::path& path, const json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

NetworkConfiguration network_for(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
    if (config.model.network == NetworkKind::complementary) {
        if (config.model.p != 0.5 || config.model.q != 0.5) {
            throw ConfigError("model.network", "the complementary network is defined for p = q = 0.5");
        }
        try {
            return build_complementary_network(n, seed);
        } catch (const ParameterError& e) {
            throw ConfigError("model.sizes", e.what());
        }
    }
    return sample_network(n, config.model.p, config.model.q, seed);
}

int cmd_simulate(const Common& c) {
    const auto config = resolve(c);
    const fs::path dir = config.output.dir;
    const std::size_t n = config.model.sizes.back();
    const auto kernel = kernel_from_json(config.model.kernel_spec);
    const auto h = transfer_from_json(config.model.transfer_spec);
    const std::size_t R = config.run.replicates;
    if (!config.run.seeds.empty() && config.run.seeds.size() < R) {
        throw ConfigError("run.seeds", "fewer explicit seeds than replicates");
    }
    std::vector<std::uint64_t> net_seeds(R), proc_seeds(R);
    for (std::size_t r = 0; r < R; ++r) {
        net_seeds[r] = config.model.network_seed ? *config.model.network_seed
                                                 : derive_seed(config.run.master_seed, kSimulateNetworkTag, r);
        proc_seeds[r] = config.run.seeds.empty() ? derive_seed(config.run.master_seed, kSimulateProcessTag, r)
                                                 : config.run.seeds[r];
    }
    std::vector<json> diagnostics(R);
    parallel_for(R, jobs_of(c), [&](std::size_t r) {
        const auto net = network_for(config, n, net_seeds[r]);
        SimulationConfig sc;
        sc.horizon = config.run.horizon;
        sc.scaling = config.model.scaling;
        sc.record_step = config.run.horizon > 0.0 ? config.resolved_step() : 0.0;
        sc.tracked = config.run.tracked;
        sc.seed = proc_seeds[r];
        const auto run = simulate(net, kernel, h, sc, config.run.backend);
        char stem[32];
        std::snprintf(stem, sizeof stem, "replicate_%04zu", r);
        if (config.output.events_format == "csv") {
            io::write_atomic(dir / (std::string(stem) + "_events.csv"), io::events_csv(run.trains));
        } else {
            io::write_atomic(dir / (std::string(stem) + "_events.jsonl"), io::events_jsonl(run.trains));
        }
        std::vector<std::string> columns{"t"};
        for (auto v : run.tracked) {
            columns.push_back("I_" + std::to_string(v));
        }
        io::CsvBuilder csv("hawkes_mf.intensity/1", columns);
        for (std::size_t m = 0; m < run.grid.points(); ++m) {
            std::vector<double> row{run.grid.time(m)};
            for (const auto& path : run.tracked_paths) {
                row.push_back(path[m]);
            }
            csv.row(row);
        }
        io::write_atomic(dir / (std::string(stem) + "_intensity.csv"), csv.str());
        const auto& d = run.diagnostics;
        diagnostics[r] = {{"replicate", r},
                          {"events", run.trains.total_events()},
                          {"candidates", d.candidates},
                          {"accepted", d.accepted},
                          {"tie_incidents", d.tie_incidents},
                          {"max_acceptance_ratio", d.max_acceptance_ratio}};
    });
    auto m = manifest("simulate", config);
    m["seeds"] = json::array();
    for (std::size_t r = 0; r < R; ++r) {
        m["seeds"].push_back({{"replicate", r}, {"network_seed", net_seeds[r]}, {"process_seed", proc_seeds[r]}});
    }
    m["diagnostics"] = diagnostics;
    write_json(dir / "manifest.json", m);
    std::cout << "simulated " << R << " replicate(s) of N = " << n << " into " << dir.string() << "\n";
    return 0;
}

int cmd_meanfield(const Common& c, const std::string& scheme_name) {
    auto config = resolve(c);
    fs::path out = config.output.dir;
    fs::path manifest_path;
    if (out.extension() == ".csv") {
        manifest_path = out;
        manifest_path.replace_extension(".manifest.json");
    } else {
        out /= "I.csv";
        manifest_path = out.parent_path() / "manifest.json";
    }
    MeanFieldScheme scheme = MeanFieldScheme::volterra_trapezoid;
    if (scheme_name == "ode_rk4") {
        scheme = MeanFieldScheme::ode_rk4;
    } else if (scheme_name != "volterra_trapezoid") {
        throw ConfigError("--scheme", "expected volterra_trapezoid or ode_rk4");
    }
    const auto kernel = kernel_from_json(config.model.kernel_spec);
    const auto h = transfer_from_json(config.model.transfer_spec);
    const auto I = solve_mean_field(kernel, h, config.model.p, config.model.q, config.run.horizon,
                                    config.resolved_step(), scheme);
    io::CsvBuilder csv("hawkes_mf.meanfield/1", {"t", "I"});
    for (std::size_t m = 0; m < I.grid.points(); ++m) {
        csv.row(std::vector<double>{I.grid.time(m), I.values[m]});
    }
    io::write_atomic(out, csv.str());
    auto m = manifest("meanfield", config);
    m["scheme"] = to_string(scheme);
    write_json(manifest_path, m);
    std::cout << "I(" << config.run.horizon << ") = " << io::format_double(I.back()) << " -> " << out.string() << "\n";
    return 0;
}

int cmd_fluctuations(const Common& c, std::optional<std::size_t> samples_override) {
    auto config = resolve(c);
    if (samples_override) {
        config.run.samples = *samples_override;
    }
    const fs::path dir = config.output.dir;
    const auto kernel = kernel_from_json(config.model.kernel_spec);
    const auto h = transfer_from_json(config.model.transfer_spec);
    const auto I = solve_mean_field(kernel, h, config.model.p, config.model.q, config.run.horizon,
                                    config.resolved_step(), MeanFieldScheme::volterra_trapezoid);
    const std::size_t n = config.run.tracked.size();
    const std::uint64_t seed = derive_seed(config.run.master_seed, kFluctuationTag, 0);
    const auto ens = sample_fluctuation_ensemble(I, kernel, h, config.model.p, config.model.q, n, config.run.samples,
                                                 seed, jobs_of(c));
    std::vector<std::string> columns{"sample", "Kbar"};
    for (std::size_t k = 0; k < n; ++k) {
        columns.push_back("K" + std::to_string(k + 1));
    }
    columns.push_back("total_count_limit");
    io::CsvBuilder terminal("hawkes_mf.fluctuations.terminal/1", columns);
    for (std::size_t r = 0; r < ens.terminal.size(); ++r) {
        std::vector<double> row{static_cast<double>(r)};
        row.insert(row.end(), ens.terminal[r].begin(), ens.terminal[r].end());
        row.push_back(ens.total_count_limit[r]);
        terminal.row(row);
    }
    io::write_atomic(dir / "terminal.csv", terminal.str());

    json summary{{"t", config.run.horizon}, {"samples", ens.terminal.size()}, {"labels", json::array()}};
    summary["labels"].push_back("Kbar");
    for (std::size_t k = 0; k < n; ++k) {
        summary["labels"].push_back("K" + std::to_string(k + 1));
    }
    if (ens.terminal.size() >= 2) {
        const auto est = covariance_of_rows(ens.terminal);
        summary["mean"] = est.mean;
        summary["covariance"] = est.covariance;
        summary["standard_error"] = est.standard_error;
        summary["dimension"] = est.dimension;
    }
    write_json(dir / "covariance.json", summary);

    const std::size_t keep = std::min(config.output.path_files, ens.terminal.size());
    for (std::size_t r = 0; r < keep; ++r) {
        const auto s = simulate_fluctuations(I, kernel, h, config.model.p, config.model.q, n, ens.seeds[r]);
        std::vector<std::string> cols{"t", "Kbar"};
        for (std::size_t k = 0; k < n; ++k) {
            cols.push_back("K" + std::to_string(k + 1));
        }
        io::CsvBuilder csv("hawkes_mf.fluctuations.path/1", cols);
        for (std::size_t m = 0; m < s.grid.points(); ++m) {
            std::vector<double> row{s.grid.time(m), s.Kbar[m]};
            for (const auto& path : s.K) {
                row.push_back(path[m]);
            }
            csv.row(row);
        }
        char name[40];
        std::snprintf(name, sizeof name, "sample_%04zu.csv", r);
        io::write_atomic(dir / "paths" / name, csv.str());
    }
    auto m = manifest("fluctuations", config);
    m["ensemble_seed"] = seed;
    m["path_files"] = keep;
    write_json(dir / "manifest.json", m);
    std::cout << "drew " << ens.terminal.size() << " fluctuation samples into " << dir.string() << "\n";
    return 0;
}

int cmd_verify(const Common& c, const std::string& experiment_flag) {
    auto config = resolve(c);
    if (!experiment_flag.empty()) {
        config.experiment = experiment_flag;
    }
    if (config.experiment.empty()) {
        throw ConfigError("experiment", "no experiment selected; pass --experiment or set experiment");
    }
    const auto names = experiment_names();
    if (std::find(names.begin(), names.end(), config.experiment) == names.end()) {
        throw ConfigError("experiment", "unknown experiment '" + config.experiment + "'");
    }
    check_regime(config, config.experiment);
    const fs::path dir = config.output.dir;
    const auto report = run_experiment(config.experiment, to_settings(config, jobs_of(c)), config.tolerances);
    write_json(dir / "report.json", report_to_json(report));
    for (const auto& table : report.tables) {
        io::write_atomic(dir / "tables" / (table.name + ".csv"), io::table_csv(table));
    }
    auto m = manifest("verify", config);
    m["seeds"] = json::array();
    for (const auto& s : report.seeds) {
        m["seeds"].push_back({{"label", s.label},
                              {"n", s.n},
                              {"replicate", s.replicate},
                              {"network_seed", s.network_seed},
                              {"process_seed", s.process_seed}});
    }
    write_json(dir / "manifest.json", m);
    for (const auto& v : report.verdicts) {
        std::cout << (v.passed ? "PASS " : (v.gating ? "FAIL " : "INFO ")) << config.experiment << "." << v.name
                  << "  statistic=" << io::format_double(v.statistic) << " threshold=" << io::format_double(v.threshold)
                  << "  (" << v.rule << ")\n";
    }
    std::cout << (report.passed() ? "verify: PASS" : "verify: FAIL") << " -> " << dir.string() << "\n";
    return report.passed() ? 0 : 1;
}

int cmd_plot_data(const std::string& report_path, const std::string& out) {
    std::ifstream in(report_path);
    if (!in) {
        throw ConfigError("--report", "cannot open " + report_path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--report", std::string("malformed report: ") + e.what());
    }
    const auto report = report_from_json(doc);
    io::write_atomic(out, io::plot_data_csv(report));
    std::cout << "wrote " << report.series.size() << " series -> " << out << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Simulation and verification toolkit for Hawkes processes on random graphs", "hawkes_mf"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(HAWKES_MF_VERSION));

    Common sim, mf, fl, ver;
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate spike trains of the finite-N process");
    add_common(simulate_cmd, sim, true);

    auto* meanfield_cmd = app.add_subcommand("meanfield", "solve the mean-field limit equation, write t,I as CSV");
    add_common(meanfield_cmd, mf, false);
    std::string scheme = "volterra_trapezoid";
    meanfield_cmd->add_option("--scheme", scheme, "volterra_trapezoid or ode_rk4");

    auto* fluct_cmd = app.add_subcommand("fluctuations", "Monte Carlo of the limiting fluctuation system");
    add_common(fluct_cmd, fl, false);
    std::optional<std::size_t> samples;
    fluct_cmd->add_option("--samples", samples, "override run.samples");

    auto* verify_cmd = app.add_subcommand("verify", "run a verification experiment; nonzero exit on FAIL");
    add_common(verify_cmd, ver, true);
    std::string experiment;
    verify_cmd->add_option("--experiment", experiment, "lln|clt|corollary|critical|independence|backend|weights|"
                                                       "convolution_bound");

    auto* plot_cmd = app.add_subcommand("plot-data", "long-format CSV of the plot series in a report");
    std::string report_path, plot_out;
    plot_cmd->add_option("--report", report_path, "report.json from verify")->required();
    plot_cmd->add_option("--out", plot_out, "output CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        if (simulate_cmd->parsed()) {
            return cmd_simulate(sim);
        }
        if (meanfield_cmd->parsed()) {
            return cmd_meanfield(mf, scheme);
        }
        if (fluct_cmd->parsed()) {
            return cmd_fluctuations(fl, samples);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(ver, experiment);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot_data(report_path, plot_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const RegimeError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace hawkes_mf::cli

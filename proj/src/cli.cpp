// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tubechan/csvio.hpp"
#include "tubechan/errors.hpp"
#include "tubechan/scenario.hpp"
#include "tubechan/simulation.hpp"

namespace tubechan {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string preset;
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::vector<double> instants{0.0};
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t realizations = 0;
    bool realizations_given = false;
    std::size_t jobs = 1;
};

void add_common_flags(CLI::App *cmd, CommonOptions &opt)
{
    cmd->add_option("--preset", opt.preset, "Scenario preset (tube, tunnel, open-hst-approx)");
    cmd->add_option("--config", opt.config_path, "Configuration file (key = value lines)");
    cmd->add_option("--set", opt.sets, "Override one config key, e.g. --set motion.speed_kmh=540")
        ->type_name("KEY=VALUE");
    cmd->add_option("--seed", opt.seed, "Master seed")->each([&](const std::string &) {
        opt.seed_given = true;
    });
    cmd->add_option("--realizations", opt.realizations, "Number of Monte Carlo realizations")
        ->each([&](const std::string &) { opt.realizations_given = true; });
    cmd->add_option("--jobs", opt.jobs, "Worker threads for independent realizations");
    cmd->add_option("--out", opt.out_dir,
                    "Output directory (default $TUBECHAN_OUT or ./tubechan-out)");
    cmd->add_option("--instants", opt.instants,
                    "Snapshot instants in seconds, comma separated")
        ->delimiter(',');
}

ScenarioConfig build_config(const CommonOptions &opt)
{
    std::string text;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot read config file: " + opt.config_path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const std::string &kv : opt.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt.seed_given)
        overrides.emplace_back("run.seed", std::to_string(opt.seed));
    if (opt.realizations_given)
        overrides.emplace_back("run.realizations", std::to_string(opt.realizations));
    return load_config(text, opt.preset, overrides);
}

fs::path resolve_out_dir(const CommonOptions &opt)
{
    if (!opt.out_dir.empty())
        return opt.out_dir;
    if (const char *env = std::getenv("TUBECHAN_OUT"); env && *env)
        return env;
    return "tubechan-out";
}

// Resolved canonical configuration, dropped next to the outputs so a
// result tree is self-describing.
void write_config_txt(const fs::path &out, const ScenarioConfig &config,
                      const std::string &name = "config.txt")
{
    std::ofstream file(out / name, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open output file: " + (out / name).string());
    file << serialize_config(config);
}

std::string hex64(std::uint64_t value)
{
    static const char digits[] = "0123456789abcdef";
    std::string out = "0x";
    for (int i = 15; i >= 0; --i)
        out += digits[(value >> (4 * i)) & 0xF];
    return out;
}

void write_correlation_csv(const fs::path &path, const std::string &lag_column, double anchor_t,
                           const std::vector<double> &lags,
                           const std::vector<std::complex<double>> &values,
                           const std::string &footer)
{
    CsvWriter csv(path.string(), {"t_s", lag_column, "re", "im", "abs"});
    for (std::size_t i = 0; i < lags.size(); ++i)
        csv.row({anchor_t, lags[i], values[i].real(), values[i].imag(), std::abs(values[i])});
    csv.finish(footer);
}

void write_pdp_csv(const fs::path &path, const PdpMatrix &matrix, const std::string &footer)
{
    CsvWriter csv(path.string(), {"t_s", "tau_s", "power"});
    for (std::size_t i = 0; i < matrix.times.size(); ++i)
        for (std::size_t k = 0; k < matrix.power[i].size(); ++k)
            if (matrix.power[i][k] > 0.0)
                csv.row({matrix.times[i], (static_cast<double>(k) + 0.5) * matrix.bin_width,
                         matrix.power[i][k]});
    csv.finish(footer);
}

void write_si_ccdf_csv(const fs::path &path, const std::vector<StationaryInterval> &si,
                       const std::string &footer)
{
    std::vector<double> samples;
    samples.reserve(si.size());
    for (const StationaryInterval &s : si)
        samples.push_back(s.interval);
    const CcdfSeries series = empirical_ccdf(std::move(samples));
    CsvWriter csv(path.string(), {"interval_s", "ccdf"});
    for (std::size_t i = 0; i < series.values.size(); ++i)
        csv.row({series.values[i], series.ccdf[i]});
    csv.finish(footer);
}

void write_clusters_csv(const fs::path &path, const ClusterCountSeries &counts,
                        const std::string &footer)
{
    CsvWriter csv(path.string(), {"t_s", "distance_m", "count"});
    for (std::size_t i = 0; i < counts.time.size(); ++i)
        csv.row({counts.time[i], counts.distance[i], counts.mean_count[i]});
    csv.finish(footer);
}

nlohmann::json snapshot_to_json(const ChannelSnapshot &snapshot, const LargeScaleGain &gain)
{
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t p = 0; p < snapshot.tx_count; ++p)
        for (std::size_t q = 0; q < snapshot.rx_count; ++q) {
            nlohmann::json components = nlohmann::json::array();
            for (const PathComponent &tap : snapshot.at(p, q)) {
                nlohmann::json c = {
                    {"re", tap.amplitude.real()},     {"im", tap.amplitude.imag()},
                    {"delay_s", tap.delay},           {"doppler_hz", tap.doppler},
                    {"kind", tap.is_los ? "los" : "nlos"},
                };
                if (!tap.is_los) {
                    c["cluster_id"] = tap.cluster_id;
                    c["ray_index"] = tap.ray_index;
                }
                components.push_back(std::move(c));
            }
            entries.push_back({{"p", p}, {"q", q}, {"components", std::move(components)}});
        }
    return {
        {"time_s", snapshot.time},
        {"tx_count", snapshot.tx_count},
        {"rx_count", snapshot.rx_count},
        {"large_scale",
         {{"path_loss_db", gain.path_loss_db},
          {"shadowing_db", gain.shadowing_db},
          {"blockage_db", gain.blockage_db},
          {"absorption_db", gain.absorption_db}}},
        {"entries", std::move(entries)},
    };
}

void write_snapshot_json(const fs::path &path, const ScenarioConfig &config,
                         const RunResult &result)
{
    nlohmann::json snapshots = nlohmann::json::array();
    std::vector<std::string> digests;
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
        digests.push_back(hex64(result.snapshot_digests[i]));
        snapshots.push_back(snapshot_to_json(result.snapshots[i], result.gains[i]));
    }
    const nlohmann::json root = {
        {"config_digest", hex64(config_digest(config))},
        {"seed", config.seed},
        {"snapshot_digests", digests},
        {"snapshots", std::move(snapshots)},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path.string());
    out << root.dump(2) << '\n';
}

int command_run(const CommonOptions &opt)
{
    const ScenarioConfig config = build_config(opt);
    const fs::path out = resolve_out_dir(opt);
    fs::create_directories(out);
    std::cerr << "run: " << config.realizations << " realization(s), horizon "
              << format_double(config.horizon_ms) << " ms\n";

    const RunResult result = run_realizations(config, opt.instants, opt.jobs);
    const std::string footer = output_footer(config_digest(config), config.seed);
    write_config_txt(out, config);
    write_clusters_csv(out / "clusters.csv", result.counts, footer);
    write_snapshot_json(out / "snapshot.json", config, result);
    return 0;
}

int command_stats(const CommonOptions &opt)
{
    const ScenarioConfig config = build_config(opt);
    const fs::path out = resolve_out_dir(opt);
    fs::create_directories(out);
    std::cerr << "stats: " << config.realizations << " realization(s), lag window "
              << format_double(config.stats.dt_span_ms) << " ms\n";

    StatsRequest request;
    const EnsembleResult result = run_stats_ensemble(config, request, opt.jobs);
    const std::string footer = output_footer(config_digest(config), config.seed);
    write_config_txt(out, config);

    write_correlation_csv(out / "acf.csv", "dt_s", result.anchor_t, result.dt_grid,
                          result.acf_ensemble, footer);
    std::vector<double> dq_over_lambda(result.dq_grid.size());
    for (std::size_t i = 0; i < result.dq_grid.size(); ++i)
        dq_over_lambda[i] = result.dq_grid[i] / config.wavelength();
    write_correlation_csv(out / "ccf.csv", "delta_over_lambda", result.anchor_t, dq_over_lambda,
                          result.ccf_ensemble, footer);
    write_correlation_csv(out / "fcf.csv", "df_hz", result.anchor_t, result.df_grid,
                          result.fcf_ensemble, footer);
    // The closed-form counterparts, for model-vs-simulation overlays.
    write_correlation_csv(out / "acf_model.csv", "dt_s", result.anchor_t, result.dt_grid,
                          result.acf_closed, footer);
    write_correlation_csv(out / "ccf_model.csv", "delta_over_lambda", result.anchor_t,
                          dq_over_lambda, result.ccf_closed, footer);
    write_correlation_csv(out / "fcf_model.csv", "df_hz", result.anchor_t, result.df_grid,
                          result.fcf_closed, footer);
    write_pdp_csv(out / "pdp.csv", result.mean_pdp, footer);
    write_si_ccdf_csv(out / "si_ccdf.csv", result.si, footer);
    return 0;
}

int command_compare(const CommonOptions &opt)
{
    if (!opt.preset.empty())
        throw ConfigError("compare runs all presets; --preset is not accepted here");
    const std::vector<std::string> presets = {"tube", "tunnel", "open-hst-approx"};

    std::vector<ScenarioConfig> configs;
    std::vector<ClusterCountSeries> counts;
    std::vector<std::vector<StationaryInterval>> intervals;
    for (const std::string &preset : presets) {
        CommonOptions per = opt;
        per.preset = preset;
        const ScenarioConfig config = build_config(per);
        std::cerr << "compare: preset " << preset << "\n";
        StatsRequest request;
        request.acf = false;
        request.ccf = false;
        request.fcf = false;
        const EnsembleResult stats = run_stats_ensemble(config, request, opt.jobs);
        const RunResult run = run_realizations(config, {}, opt.jobs);
        configs.push_back(config);
        counts.push_back(run.counts);
        intervals.push_back(stats.si);
    }

    const fs::path out = resolve_out_dir(opt);
    fs::create_directories(out);

    write_config_txt(out, configs[0], "config_tube.txt");
    write_config_txt(out, configs[1], "config_tunnel.txt");
    write_config_txt(out, configs[2], "config_open-hst-approx.txt");
    std::string footer = "config_digest=" + hex64(config_digest(configs[0])) + ";" +
                         hex64(config_digest(configs[1])) + ";" +
                         hex64(config_digest(configs[2])) +
                         " seed=" + std::to_string(configs[0].seed);

    {
        CsvWriter csv((out / "clusters_compare.csv").string(),
                      {"t_s", "distance_m", "count_tube", "count_tunnel",
                       "count_open_hst_approx"});
        for (std::size_t i = 0; i < counts[0].time.size(); ++i)
            csv.row({counts[0].time[i], counts[0].distance[i], counts[0].mean_count[i],
                     counts[1].mean_count[i], counts[2].mean_count[i]});
        csv.finish(footer);
    }
    {
        // Joined CCDFs evaluated on the union of all observed intervals.
        std::vector<double> grid;
        std::vector<std::vector<double>> samples(presets.size());
        for (std::size_t s = 0; s < presets.size(); ++s) {
            for (const StationaryInterval &si : intervals[s]) {
                grid.push_back(si.interval);
                samples[s].push_back(si.interval);
            }
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        CsvWriter csv((out / "si_ccdf_compare.csv").string(),
                      {"interval_s", "ccdf_tube", "ccdf_tunnel", "ccdf_open_hst_approx"});
        for (double x : grid) {
            std::vector<double> row{x};
            for (std::size_t s = 0; s < presets.size(); ++s) {
                const auto greater = std::count_if(samples[s].begin(), samples[s].end(),
                                                   [x](double v) { return v > x; });
                row.push_back(static_cast<double>(greater) /
                              static_cast<double>(samples[s].size()));
            }
            csv.row(row);
        }
        csv.finish(footer);
    }
    return 0;
}

int command_sweep(const CommonOptions &opt, const std::string &key,
                  const std::vector<std::string> &values)
{
    if (values.empty())
        throw ConfigError("sweep requires at least one value");
    const fs::path out = resolve_out_dir(opt);
    fs::create_directories(out);

    std::vector<std::vector<double>> acf_abs;
    std::vector<double> dt_grid;
    std::uint64_t seed = 0;
    std::string digests;

    for (const std::string &value : values) {
        CommonOptions per = opt;
        per.sets.push_back(key + "=" + value);
        const ScenarioConfig config = build_config(per);
        std::cerr << "sweep: " << key << " = " << value << "\n";
        const EnsembleResult result = run_stats_ensemble(config, StatsRequest{}, opt.jobs);

        const fs::path sub = out / (key + "=" + value);
        fs::create_directories(sub);
        const std::string footer = output_footer(config_digest(config), config.seed);
        write_config_txt(sub, config);
        write_correlation_csv(sub / "acf.csv", "dt_s", result.anchor_t, result.dt_grid,
                              result.acf_ensemble, footer);
        std::vector<double> dq_over_lambda(result.dq_grid.size());
        for (std::size_t i = 0; i < result.dq_grid.size(); ++i)
            dq_over_lambda[i] = result.dq_grid[i] / config.wavelength();
        write_correlation_csv(sub / "ccf.csv", "delta_over_lambda", result.anchor_t,
                              dq_over_lambda, result.ccf_ensemble, footer);
        write_correlation_csv(sub / "fcf.csv", "df_hz", result.anchor_t, result.df_grid,
                              result.fcf_ensemble, footer);
        write_pdp_csv(sub / "pdp.csv", result.mean_pdp, footer);
        write_si_ccdf_csv(sub / "si_ccdf.csv", result.si, footer);

        dt_grid = result.dt_grid;
        seed = config.seed;
        digests += (digests.empty() ? "" : ";") + hex64(config_digest(config));
        std::vector<double> abs_row(result.acf_ensemble.size());
        for (std::size_t i = 0; i < abs_row.size(); ++i)
            abs_row[i] = std::abs(result.acf_ensemble[i]);
        acf_abs.push_back(std::move(abs_row));
    }

    std::vector<std::string> columns{"dt_s"};
    for (const std::string &value : values)
        columns.push_back("abs_" + value);
    CsvWriter csv((out / "sweep_acf.csv").string(), columns);
    for (std::size_t i = 0; i < dt_grid.size(); ++i) {
        std::vector<double> row{dt_grid[i]};
        for (const auto &abs_row : acf_abs)
            row.push_back(abs_row[i]);
        csv.row(row);
    }
    csv.finish("config_digest=" + digests + " seed=" + std::to_string(seed) +
               " swept_key=" + key);
    return 0;
}

} // namespace

int cli_main(int argc, const char *const *argv)
{
    CLI::App app{"Non-stationary mmWave channel simulator for vacuum-tube "
                 "ultra-high-speed train links"};
    app.require_subcommand(1);

    CommonOptions run_opt;
    CLI::App *run_cmd = app.add_subcommand(
        "run", "Evolve realizations; write clusters.csv and snapshot.json");
    add_common_flags(run_cmd, run_opt);

    CommonOptions stats_opt;
    CLI::App *stats_cmd = app.add_subcommand(
        "stats", "Compute acf/ccf/fcf/pdp/si_ccdf over an ensemble");
    add_common_flags(stats_cmd, stats_opt);

    CommonOptions compare_opt;
    CLI::App *compare_cmd = app.add_subcommand(
        "compare", "Run tube, tunnel and open-hst-approx under one seed policy");
    add_common_flags(compare_cmd, compare_opt);

    CommonOptions sweep_opt;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    CLI::App *sweep_cmd =
        app.add_subcommand("sweep", "Vary one config key over a list of values");
    add_common_flags(sweep_cmd, sweep_opt);
    sweep_cmd->add_option("--key", sweep_key, "Config key to sweep")->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed())
            return command_run(run_opt);
        if (stats_cmd->parsed())
            return command_stats(stats_opt);
        if (compare_cmd->parsed())
            return command_compare(compare_opt);
        return command_sweep(sweep_opt, sweep_key, sweep_values);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace tubechan

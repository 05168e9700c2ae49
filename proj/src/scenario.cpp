// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "tubechan/errors.hpp"

namespace tubechan {

namespace {

struct RawEntry {
    std::string value;
    std::size_t line = 0;
};

using RawMap = std::map<std::string, RawEntry>;

std::string trim(const std::string &s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// key = value lines, '#' starts a comment, blank lines ignored.
RawMap parse_document(const std::string &text)
{
    RawMap entries;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("empty key", line_no);
        if (value.empty())
            throw ConfigError("empty value for key '" + key + "'", line_no);
        if (entries.count(key))
            throw ConfigError("duplicate key '" + key + "'", line_no);
        entries[key] = {value, line_no};
    }
    return entries;
}

double parse_double(const std::string &key, const RawEntry &entry)
{
    const char *begin = entry.value.data();
    const char *end = begin + entry.value.size();
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("key '" + key + "': not a number: '" + entry.value + "'", entry.line);
    return out;
}

std::size_t parse_size(const std::string &key, const RawEntry &entry)
{
    const char *begin = entry.value.data();
    const char *end = begin + entry.value.size();
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("key '" + key + "': not a non-negative integer: '" + entry.value + "'",
                          entry.line);
    return out;
}

std::uint64_t parse_u64(const std::string &key, const RawEntry &entry)
{
    const char *begin = entry.value.data();
    const char *end = begin + entry.value.size();
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("key '" + key + "': not a non-negative integer: '" + entry.value + "'",
                          entry.line);
    return out;
}

bool parse_bool(const std::string &key, const RawEntry &entry)
{
    if (entry.value == "true")
        return true;
    if (entry.value == "false")
        return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + entry.value + "'",
                      entry.line);
}

// One row per config key: how to read it into the struct and how to write
// it back out. Keeping both directions in one table makes the serialized
// round trip exact by construction.
struct KeySpec {
    std::string name;
    std::function<void(ScenarioConfig &, const RawEntry &)> read;
    std::function<std::string(const ScenarioConfig &)> write;
    bool required = false;
};

std::string format_bool(bool v) { return v ? "true" : "false"; }

const std::vector<KeySpec> &key_table()
{
    auto num = [](std::string name, double ScenarioConfig::*field, bool required = false) {
        return KeySpec{name,
                       [name, field](ScenarioConfig &c, const RawEntry &e) {
                           c.*field = parse_double(name, e);
                       },
                       [field](const ScenarioConfig &c) { return format_double(c.*field); },
                       required};
    };
    auto stat = [](std::string name, double StatsSettings::*field) {
        return KeySpec{name,
                       [name, field](ScenarioConfig &c, const RawEntry &e) {
                           c.stats.*field = parse_double(name, e);
                       },
                       [field](const ScenarioConfig &c) { return format_double(c.stats.*field); },
                       false};
    };
    auto count = [](std::string name, std::size_t ScenarioConfig::*field) {
        return KeySpec{name,
                       [name, field](ScenarioConfig &c, const RawEntry &e) {
                           c.*field = parse_size(name, e);
                       },
                       [field](const ScenarioConfig &c) { return std::to_string(c.*field); },
                       false};
    };
    auto flag = [](std::string name, bool ScenarioConfig::*field) {
        return KeySpec{name,
                       [name, field](ScenarioConfig &c, const RawEntry &e) {
                           c.*field = parse_bool(name, e);
                       },
                       [field](const ScenarioConfig &c) { return format_bool(c.*field); }, false};
    };

    static const std::vector<KeySpec> table = {
        num("scene.radius_m", &ScenarioConfig::radius_m, true),
        num("scene.axis_height_m", &ScenarioConfig::axis_height_m),
        num("scene.tx_x_m", &ScenarioConfig::tx_x_m),
        num("scene.tx_y_m", &ScenarioConfig::tx_y_m),
        num("scene.tx_z_m", &ScenarioConfig::tx_z_m),
        num("scene.d0_m", &ScenarioConfig::d0_m, true),
        num("scene.rx_y_m", &ScenarioConfig::rx_y_m),
        num("scene.rx_z_m", &ScenarioConfig::rx_z_m),
        count("array.tx_count", &ScenarioConfig::tx_count),
        count("array.rx_count", &ScenarioConfig::rx_count),
        num("array.spacing_wavelengths", &ScenarioConfig::spacing_wavelengths),
        num("carrier.fc_ghz", &ScenarioConfig::fc_ghz, true),
        num("motion.speed_kmh", &ScenarioConfig::speed_kmh, true),
        num("motion.dir_x", &ScenarioConfig::dir_x),
        num("motion.dir_y", &ScenarioConfig::dir_y),
        num("motion.dir_z", &ScenarioConfig::dir_z),
        num("rician.k_db", &ScenarioConfig::k_db, true),
        num("evolution.birth_rate_per_m", &ScenarioConfig::birth_rate_per_m, true),
        num("evolution.death_rate_per_m", &ScenarioConfig::death_rate_per_m, true),
        num("evolution.correlation_distance_m", &ScenarioConfig::correlation_distance_m),
        num("evolution.relaxation_distance_m", &ScenarioConfig::relaxation_distance_m),
        num("evolution.roughness_m", &ScenarioConfig::roughness_m, true),
        num("evolution.rho_s0", &ScenarioConfig::rho_s0),
        num("evolution.k_tx", &ScenarioConfig::k_tx),
        num("evolution.k_rx", &ScenarioConfig::k_rx),
        num("evolution.k_intra", &ScenarioConfig::k_intra),
        num("evolution.mean_rays", &ScenarioConfig::mean_rays),
        num("evolution.mean_virtual_delay_ns", &ScenarioConfig::mean_virtual_delay_ns),
        num("evolution.mean_intra_delay_ns", &ScenarioConfig::mean_intra_delay_ns),
        num("evolution.intra_power_decay", &ScenarioConfig::intra_power_decay),
        num("evolution.per_ray_shadow_db", &ScenarioConfig::per_ray_shadow_db),
        flag("evolution.waveguide", &ScenarioConfig::waveguide),
        num("evolution.birth_scale", &ScenarioConfig::birth_scale),
        num("evolution.max_wall_distance_m", &ScenarioConfig::max_wall_distance_m),
        KeySpec{"gain.model",
                [](ScenarioConfig &c, const RawEntry &e) {
                    if (e.value != "free_space" && e.value != "unity")
                        throw ConfigError("gain.model: expected free_space or unity, got '" +
                                              e.value + "'",
                                          e.line);
                    c.gain_model = e.value;
                },
                [](const ScenarioConfig &c) { return c.gain_model; }, false},
        num("gain.shadow_sigma_db", &ScenarioConfig::gain_shadow_db),
        stat("stats.anchor_ms", &StatsSettings::anchor_ms),
        stat("stats.anchor_f_mhz", &StatsSettings::anchor_f_mhz),
        stat("stats.dt_step_us", &StatsSettings::dt_step_us),
        stat("stats.dt_span_ms", &StatsSettings::dt_span_ms),
        stat("stats.delta_step_wavelengths", &StatsSettings::delta_step_wavelengths),
        stat("stats.delta_max_wavelengths", &StatsSettings::delta_max_wavelengths),
        KeySpec{"stats.freq_points",
                [](ScenarioConfig &c, const RawEntry &e) {
                    c.stats.freq_points = parse_size("stats.freq_points", e);
                },
                [](const ScenarioConfig &c) { return std::to_string(c.stats.freq_points); },
                false},
        stat("stats.freq_span_mhz", &StatsSettings::freq_span_mhz),
        stat("stats.delay_bin_ns", &StatsSettings::delay_bin_ns),
        stat("stats.si_threshold", &StatsSettings::si_threshold),
        num("run.step_us", &ScenarioConfig::step_us),
        num("run.horizon_ms", &ScenarioConfig::horizon_ms),
        count("run.realizations", &ScenarioConfig::realizations),
        KeySpec{"run.seed",
                [](ScenarioConfig &c, const RawEntry &e) { c.seed = parse_u64("run.seed", e); },
                [](const ScenarioConfig &c) { return std::to_string(c.seed); }, false},
        flag("run.log_detail", &ScenarioConfig::log_detail),
    };
    return table;
}

const std::map<std::string, std::map<std::string, std::string>> &preset_table()
{
    // "tube" is the vacuum-tube baseline; "tunnel" only roughens the wall;
    // "open-hst-approx" drops the waveguide confinement and scales births as
    // a coarse stand-in for an open high-speed-rail environment.
    static const std::map<std::string, std::map<std::string, std::string>> presets = {
        {"tube",
         {
             {"scene.radius_m", "2"},
             {"scene.d0_m", "600"},
             {"carrier.fc_ghz", "58"},
             {"motion.speed_kmh", "1080"},
             {"rician.k_db", "-5"},
             {"evolution.birth_rate_per_m", "80"},
             {"evolution.death_rate_per_m", "4"},
             {"evolution.roughness_m", "0"},
         }},
        {"tunnel",
         {
             {"scene.radius_m", "2"},
             {"scene.d0_m", "600"},
             {"carrier.fc_ghz", "58"},
             {"motion.speed_kmh", "1080"},
             {"rician.k_db", "-5"},
             {"evolution.birth_rate_per_m", "80"},
             {"evolution.death_rate_per_m", "4"},
             {"evolution.roughness_m", "0.002"},
         }},
        {"open-hst-approx",
         {
             {"scene.radius_m", "2"},
             {"scene.d0_m", "600"},
             {"carrier.fc_ghz", "58"},
             {"motion.speed_kmh", "1080"},
             {"rician.k_db", "-5"},
             {"evolution.birth_rate_per_m", "80"},
             {"evolution.death_rate_per_m", "4"},
             {"evolution.roughness_m", "0"},
             {"evolution.waveguide", "false"},
             {"evolution.birth_scale", "3"},
         }},
    };
    return presets;
}

std::string preset_list_message()
{
    std::string msg = "known presets:";
    for (const std::string &name : known_presets())
        msg += " " + name;
    return msg;
}

} // namespace

std::vector<std::string> known_presets()
{
    std::vector<std::string> names;
    for (const auto &[name, keys] : preset_table())
        names.push_back(name);
    return names;
}

Vec3 ScenarioConfig::velocity() const
{
    const Vec3 dir{dir_x, dir_y, dir_z};
    const double n = norm(dir);
    if (n <= 0.0)
        throw ConfigError("motion direction must be a nonzero vector");
    return dir * (speed_ms() / n);
}

TubeScene ScenarioConfig::scene() const
{
    TubeScene s;
    s.radius = radius_m;
    s.axis_height = axis_height_m;
    s.tx_reference = {tx_x_m, tx_y_m, tx_z_m};
    s.rx_initial = {tx_x_m + d0_m, rx_y_m, rx_z_m};
    return s;
}

ArrayLayout ScenarioConfig::arrays() const
{
    return {tx_count, rx_count, spacing_wavelengths * wavelength()};
}

EvolutionParams ScenarioConfig::evolution() const
{
    EvolutionParams p;
    p.birth_rate_per_m = birth_rate_per_m;
    p.death_rate_per_m = death_rate_per_m;
    p.correlation_distance_m = correlation_distance_m;
    // The relaxation constant is configured as travel distance so the delay
    // drift tracks the environment rather than wall-clock time.
    p.delay_relaxation_s = speed_ms() > 0.0 ? relaxation_distance_m / speed_ms()
                                            : std::numeric_limits<double>::infinity();
    p.roughness_m = roughness_m;
    p.rho_s0 = rho_s0;
    p.von_mises_k_tx = k_tx;
    p.von_mises_k_rx = k_rx;
    p.von_mises_k_intra = k_intra;
    p.mean_rays_per_cluster = mean_rays;
    p.mean_virtual_delay_s = mean_virtual_delay_ns * 1e-9;
    p.mean_intra_delay_s = mean_intra_delay_ns * 1e-9;
    p.intra_power_decay = intra_power_decay;
    p.per_ray_shadow_sigma_db = per_ray_shadow_db;
    p.waveguide_enabled = waveguide;
    p.birth_scale = birth_scale;
    p.max_wall_distance_m = max_wall_distance_m;
    return p;
}

GainModel ScenarioConfig::gain() const
{
    return gain_model == "unity" ? GainModel::unity : GainModel::free_space_lognormal;
}

void ScenarioConfig::validate() const
{
    if (fc_ghz <= 0.0)
        throw ConfigError("carrier.fc_ghz must be positive");
    if (realizations < 1)
        throw ConfigError("run.realizations must be at least 1");
    if (tx_count < 1 || rx_count < 1)
        throw ConfigError("array element counts must be at least 1");
    if (spacing_wavelengths <= 0.0)
        throw ConfigError("array.spacing_wavelengths must be positive");
    if (speed_kmh < 0.0)
        throw ConfigError("motion.speed_kmh must be non-negative");
    if (stats.si_threshold <= 0.0 || stats.si_threshold > 1.0)
        throw ConfigError("stats.si_threshold must be in (0, 1]");
    if (stats.dt_step_us <= 0.0 || stats.dt_span_ms <= 0.0)
        throw ConfigError("stats time grid must be positive");
    if (stats.delay_bin_ns <= 0.0)
        throw ConfigError("stats.delay_bin_ns must be positive");
    if (stats.freq_points < 2)
        throw ConfigError("stats.freq_points must be at least 2");
    if (step_us <= 0.0 || horizon_ms <= 0.0)
        throw ConfigError("run.step_us and run.horizon_ms must be positive");
    velocity(); // direction check
    try {
        scene().validate();
        evolution().validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    if (RicianModel::from_db(k_db).k_linear < 0.0)
        throw ConfigError("rician.k_db out of range");
}

ScenarioConfig load_config(const std::string &text, const std::string &preset_flag,
                           const std::vector<std::pair<std::string, std::string>> &overrides)
{
    RawMap raw = parse_document(text);

    // Preset resolution: explicit flag wins over the document's preset key.
    std::string preset = preset_flag;
    if (auto it = raw.find("preset"); it != raw.end()) {
        if (preset.empty())
            preset = it->second.value;
        raw.erase(it);
    }
    if (!preset.empty() && !preset_table().count(preset))
        throw ConfigError("unknown preset '" + preset + "'; " + preset_list_message());

    // Merge order: preset keys, then the document, then overrides.
    RawMap merged;
    if (!preset.empty())
        for (const auto &[key, value] : preset_table().at(preset))
            merged[key] = {value, 0};
    for (const auto &[key, entry] : raw)
        merged[key] = entry;
    for (const auto &[key, value] : overrides)
        merged[key] = {value, 0};

    ScenarioConfig config;
    config.preset = preset;

    std::vector<std::string> provided;
    for (const KeySpec &spec : key_table()) {
        if (auto it = merged.find(spec.name); it != merged.end()) {
            spec.read(config, it->second);
            provided.push_back(spec.name);
            merged.erase(it);
        }
    }
    if (!merged.empty()) {
        const auto &[key, entry] = *merged.begin();
        throw ConfigError("unknown key '" + key + "'", entry.line);
    }

    // Required keys must come from a preset or be spelled out.
    std::vector<std::string> missing;
    for (const KeySpec &spec : key_table())
        if (spec.required &&
            std::find(provided.begin(), provided.end(), spec.name) == provided.end())
            missing.push_back(spec.name);
    if (!missing.empty()) {
        std::string msg = "missing required keys (set a preset or provide them):";
        for (const std::string &name : missing)
            msg += " " + name;
        throw ConfigError(msg);
    }

    config.validate();
    return config;
}

ScenarioConfig preset_config(const std::string &name) { return load_config("", name); }

std::string serialize_config(const ScenarioConfig &config)
{
    std::string out;
    if (!config.preset.empty())
        out += "preset = " + config.preset + "\n";
    for (const KeySpec &spec : key_table())
        out += spec.name + " = " + spec.write(config) + "\n";
    return out;
}

std::uint64_t config_digest(const ScenarioConfig &config)
{
    const std::string text = serialize_config(config);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string format_double(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc())
        return "nan";
    return std::string(buffer, ptr);
}

} // namespace tubechan

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tubechan/cir.hpp"
#include "tubechan/evolution.hpp"
#include "tubechan/geometry.hpp"

namespace tubechan {

// Statistics grids and anchors, config units.
struct StatsSettings {
    double anchor_ms = 0.0;
    double anchor_f_mhz = 0.0;
    double dt_step_us = 10.0;
    double dt_span_ms = 1.0;
    double delta_step_wavelengths = 0.1;
    double delta_max_wavelengths = 3.0;
    std::size_t freq_points = 512;
    double freq_span_mhz = 400.0;
    double delay_bin_ns = 5.0;
    double si_threshold = 0.8;
};

// Full scenario parameter set. Values are stored in the units the config
// file uses (km/h, GHz, ns, dB); SI conversion happens only in the derived
// accessors at the bottom.
struct ScenarioConfig {
    std::string preset; // empty when assembled without a preset

    // scene
    double radius_m = 2.0;
    double axis_height_m = 2.0;
    double tx_x_m = 0.0;
    double tx_y_m = 0.0;
    double tx_z_m = 4.0;
    double d0_m = 600.0;
    double rx_y_m = 0.0;
    double rx_z_m = 3.0;

    // arrays
    std::size_t tx_count = 2;
    std::size_t rx_count = 2;
    double spacing_wavelengths = 1.0;

    // carrier / motion / Rician factor
    double fc_ghz = 58.0;
    double speed_kmh = 1080.0;
    double dir_x = -1.0;
    double dir_y = 0.0;
    double dir_z = 0.0;
    double k_db = 6.0;

    // cluster evolution (per-meter rates; delays in ns; relaxation as travel
    // distance, converted to seconds with the configured speed)
    double birth_rate_per_m = 80.0;
    double death_rate_per_m = 4.0;
    double correlation_distance_m = 10.0;
    double relaxation_distance_m = 0.45;
    double roughness_m = 0.0;
    double rho_s0 = 1.0;
    double k_tx = 6.0;
    double k_rx = 6.0;
    double k_intra = 100.0;
    double mean_rays = 10.0;
    double mean_virtual_delay_ns = 400.0;
    double mean_intra_delay_ns = 5.0;
    double intra_power_decay = 2.0;
    double per_ray_shadow_db = 0.0;
    bool waveguide = true;
    double birth_scale = 1.0;
    double max_wall_distance_m = 0.0; // 0 = initial distance

    // large-scale gain hook
    std::string gain_model = "free_space";
    double gain_shadow_db = 0.0;

    StatsSettings stats;

    // run control
    double step_us = 10.0;
    double horizon_ms = 1.0;
    std::size_t realizations = 1;
    std::uint64_t seed = 1;
    bool log_detail = false;

    // Derived SI quantities.
    double fc_hz() const { return fc_ghz * 1e9; }
    double wavelength() const { return kSpeedOfLight / fc_hz(); }
    double speed_ms() const { return speed_kmh / 3.6; }
    Vec3 velocity() const;
    double step_s() const { return step_us * 1e-6; }
    double horizon_s() const { return horizon_ms * 1e-3; }

    TubeScene scene() const;
    ArrayLayout arrays() const;
    MotionState motion_at(double t) const { return {velocity(), t}; }
    RicianModel rician() const { return RicianModel::from_db(k_db); }
    EvolutionParams evolution() const;
    GainModel gain() const;

    void validate() const;
};

// Parses the flat key-value document (`key = value` lines, `#` comments),
// applies the preset named inside or passed explicitly, then the overrides,
// and validates. Unknown keys, duplicates, bad values and missing required
// keys raise ConfigError with the offending line where applicable.
ScenarioConfig load_config(const std::string &text, const std::string &preset_flag = "",
                           const std::vector<std::pair<std::string, std::string>> &overrides = {});

// Preset without a document.
ScenarioConfig preset_config(const std::string &name);

std::vector<std::string> known_presets();

// Canonical serialized form (sorted keys, shortest round-trip floats).
// load_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig &config);

// FNV-1a digest of the canonical serialization, for output footers.
std::uint64_t config_digest(const ScenarioConfig &config);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

} // namespace tubechan

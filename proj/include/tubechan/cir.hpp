// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tubechan/evolution.hpp"
#include "tubechan/geometry.hpp"
#include "tubechan/rng.hpp"

namespace tubechan {

// One discrete channel tap.
struct PathComponent {
    std::complex<double> amplitude;
    double delay = 0.0;   // s
    double doppler = 0.0; // Hz
    bool is_los = false;
    std::uint64_t cluster_id = 0;
    std::uint32_t ray_index = 0;
};

// Rician power split: LoS fraction K/(K+1), scattered fraction 1/(K+1).
struct RicianModel {
    double k_linear = 1.0;

    static RicianModel from_db(double k_db);
    double los_fraction() const { return k_linear / (k_linear + 1.0); }
    double nlos_fraction() const { return 1.0 / (k_linear + 1.0); }
};

// Linear array sizes at both link ends; elements run along the tube axis.
struct ArrayLayout {
    std::size_t tx_count = 2;
    std::size_t rx_count = 2;
    double spacing = 0.0; // m
};

// Full small-scale channel state at one time instant: scene, arrays, motion
// and the alive cluster set. Snapshots and correlation functions are pure
// functions of this bundle.
struct ModelState {
    TubeScene scene;
    ArrayLayout arrays;
    MotionState motion;
    RicianModel rician;
    double wavelength = 0.0;
    std::vector<Cluster> clusters;

    Vec3 tx_center() const { return scene.tx_reference; }
    Vec3 rx_center() const { return advance_rx(scene.rx_initial, motion.velocity, motion.time); }
    Vec3 rx_center_at(double t) const { return advance_rx(scene.rx_initial, motion.velocity, t); }
    AntennaArray tx_array() const;
    AntennaArray rx_array() const;
};

// CIR taps for every Tx/Rx element pair at one time instant.
struct ChannelSnapshot {
    double time = 0.0;
    std::size_t tx_count = 0;
    std::size_t rx_count = 0;
    std::vector<std::vector<PathComponent>> entries; // indexed p * rx_count + q

    const std::vector<PathComponent> &at(std::size_t p, std::size_t q) const
    {
        return entries[p * rx_count + q];
    }
};

// Large-scale terms in dB; reported separately, not folded into snapshots.
struct LargeScaleGain {
    double path_loss_db = 0.0;
    double shadowing_db = 0.0;
    double blockage_db = 0.0;
    double absorption_db = 0.0;

    double total_db() const { return path_loss_db + shadowing_db + blockage_db + absorption_db; }
    double amplitude_factor() const { return std::pow(10.0, -total_db() / 20.0); }
};

enum class GainModel {
    free_space_lognormal, // free-space path loss + optional log-normal shadowing
    unity,                // all terms 0 dB
};

// LoS complex gain sqrt(K/(K+1)) * e^{-j 2 pi |d| / lambda} * e^{j 2 pi f t}.
std::complex<double> los_coefficient(double k_linear, const Vec3 &d_los, const Vec3 &velocity,
                                     double wavelength, double t);

// NLoS ray gain sqrt(P/(K+1)) * e^{j(phase - 2 pi D / lambda)} * e^{j 2 pi f t}.
std::complex<double> nlos_coefficient(double ray_power, double k_linear, double phase,
                                      double total_distance, double doppler, double wavelength,
                                      double t);

// Builds the per-pair tap lists for the current state.
ChannelSnapshot assemble_cir(const ModelState &state);

// Transfer function H(t, f) of one antenna pair over the frequency grid.
std::vector<std::complex<double>> transfer_function(const ChannelSnapshot &snapshot,
                                                    std::size_t p, std::size_t q,
                                                    const std::vector<double> &frequencies);

// Composite large-scale gain for a link of length `distance`; pass an RNG
// when shadow_sigma_db > 0, otherwise shadowing is 0 dB.
LargeScaleGain composite_gain(GainModel model, double distance, double wavelength,
                              double shadow_sigma_db = 0.0, RngStream *rng = nullptr);

// FNV-1a digest over the snapshot's component data (bit patterns of time,
// amplitudes, delays, Dopplers). Stable across replays with the same seed.
std::uint64_t snapshot_digest(const ChannelSnapshot &snapshot);

} // namespace tubechan

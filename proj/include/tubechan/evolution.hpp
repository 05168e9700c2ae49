// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <cstdint>
#include <vector>

#include "tubechan/geometry.hpp"
#include "tubechan/rng.hpp"

namespace tubechan {

// One ray of an effective cluster. `weight` is the unnormalized power the
// per-step update acts on; `power` is the normalized share across all rays
// of all alive clusters (what enters the channel coefficients).
struct Ray {
    double tx_azimuth = 0.0; // absolute angles, radians
    double tx_elevation = 0.0;
    double rx_azimuth = 0.0;
    double rx_elevation = 0.0;
    double delay_offset = 0.0; // s, static over the cluster life
    double weight = 0.0;
    double power = 0.0;
    double phase = 0.0; // initial phase in [0, 2*pi)
    Vec3 wall_tx;       // global bounce anchors, fixed at birth
    Vec3 wall_rx;
};

// Effective scatterer on the tube wall with its rays.
struct Cluster {
    std::uint64_t id = 0;
    double tx_azimuth = 0.0; // cluster mean angles
    double tx_elevation = 0.0;
    double rx_azimuth = 0.0;
    double rx_elevation = 0.0;
    double virtual_delay = 0.0;    // s, relaxes over time, drives the delay
    double virtual_distance = 0.0; // m, virtual link length frozen at birth (phase path)
    double delay = 0.0;            // s, geometric legs / c + virtual delay
    double birth_time = 0.0;
    Vec3 wall_tx; // mean-angle bounce anchors, fixed at birth
    Vec3 wall_rx;
    std::vector<Ray> rays;
};

// Birth-death and sampling parameters. Rates are per meter of receiver
// travel; delays and the relaxation constant are in seconds (the config
// layer converts from travel distance where applicable).
struct EvolutionParams {
    double birth_rate_per_m = 80.0;        // lambda_G (r_b)
    double death_rate_per_m = 4.0;         // lambda_R (r_d)
    double correlation_distance_m = 10.0;  // D_c in the survival exponent
    double delay_relaxation_s = 1.5e-3;    // varsigma
    double roughness_m = 0.0;              // sigma_h
    double rho_s0 = 1.0;                   // scattering coefficient at sigma_h = 0
    double von_mises_k_tx = 6.0;           // k1
    double von_mises_k_rx = 6.0;           // k2
    double von_mises_k_intra = 100.0;      // intra-cluster ray offset concentration
    double mean_rays_per_cluster = 10.0;
    double mean_virtual_delay_s = 4e-7;
    double mean_intra_delay_s = 5e-9;
    double intra_power_decay = 2.0;        // r_tau, > 1
    double per_ray_shadow_sigma_db = 0.0;  // 0 disables per-ray shadowing
    bool waveguide_enabled = true;         // distance factor in the birth mean
    double birth_scale = 1.0;              // extra multiplier on the birth mean
    double max_wall_distance_m = 0.0;      // 0 = use the scene's initial distance

    void validate() const;
};

// Survival probability of a cluster over dt at the given speed:
// exp(-death_rate * speed * dt / correlation_distance).
double survival_probability(double dt, double speed, const EvolutionParams &params);

// Roughness scattering coefficient exp(-8*(pi*sigma_h*cos(mean_el)/lambda)^2).
double scattering_coefficient(double roughness_m, double mean_elevation, double wavelength);

// Mean of the Poisson number of clusters born this step,
// (rb/rd) * (1 - P_T) * (1 - d_los/D) * (rho_s/rho_s0), clamped at 0. The
// distance factor is clamped to [0,1] and dropped when the waveguide term is
// disabled; birth_scale multiplies the result.
double mean_new_clusters(double survival, double los_distance, double initial_distance,
                         double rho_s, const EvolutionParams &params);

/// Offsets of L rays at the (l - 0.5) / L quantiles of the zero-mean
/// Von Mises(kappa) distribution (equal-area discretization). Sorted,
/// symmetric about 0. Results are memoized per (count, kappa).
std::vector<double> eam_discretize(std::size_t ray_count, double kappa);

// Unnormalized per-ray weights for the given intra-cluster delay offsets:
// exponential single-slope decay with optional log-normal per-ray shadowing.
std::vector<double> ray_powers(const std::vector<double> &delay_offsets,
                               const EvolutionParams &params, RngStream &rng);

// First-order relaxation of the virtual delay toward a fresh draw X:
// exp(-dt/varsigma)*tau + (1 - exp(-dt/varsigma))*X.
double update_virtual_delay(double virtual_delay, double dt, double relaxation, double x);

// Cluster delay from its geometric leg norms and next virtual delay.
double update_cluster_delay(double rx_leg_norm, double tx_leg_norm, double virtual_delay_next);

// Per-ray weight update (3*tau_old - 2*tau_new + tau_l)/(tau_old + tau_l),
// clamped below at zero.
double update_ray_power(double weight, double tau_old, double tau_new, double delay_offset);

// Draws a new cluster around the current LoS directions.
Cluster sample_new_cluster(const TubeScene &scene, const MotionState &motion,
                           const EvolutionParams &params, RngStream &rng);

// One evolution step: survival test, delay/power updates for survivors,
// Poisson births, global power renormalization. `motion.time` must already
// be the post-step time; `next_id` supplies fresh cluster ids.
std::vector<Cluster> evolve_step(std::vector<Cluster> state, double dt, const TubeScene &scene,
                                 const MotionState &motion, const EvolutionParams &params,
                                 double wavelength, RngStream &rng, std::uint64_t &next_id);

// Initial cluster set at t = 0: Poisson(rb/rd * rho_s/rho_s0 * birth_scale)
// clusters drawn near the process steady state, normalized.
std::vector<Cluster> cold_start(const TubeScene &scene, const MotionState &motion,
                                const EvolutionParams &params, double wavelength, RngStream &rng,
                                std::uint64_t &next_id);

// Rescales ray weights so normalized powers sum to 1 (no-op when the total
// weight is zero or no clusters are alive).
void normalize_powers(std::vector<Cluster> &clusters);

// Mean elevation angle at the Rx over alive clusters, 0 when none are alive.
double mean_rx_elevation(const std::vector<Cluster> &clusters);

// Total normalized power across all rays of all clusters.
double total_power(const std::vector<Cluster> &clusters);

} // namespace tubechan

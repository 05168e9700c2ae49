// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "tubechan/errors.hpp"
#include "tubechan/vonmises.hpp"

namespace tubechan {

void EvolutionParams::validate() const
{
    if (birth_rate_per_m <= 0.0 || death_rate_per_m <= 0.0)
        throw std::invalid_argument("EvolutionParams: birth/death rates must be positive");
    if (correlation_distance_m <= 0.0)
        throw std::invalid_argument("EvolutionParams: correlation distance must be positive");
    if (delay_relaxation_s <= 0.0)
        throw std::invalid_argument("EvolutionParams: delay relaxation must be positive");
    if (roughness_m < 0.0)
        throw std::invalid_argument("EvolutionParams: roughness must be non-negative");
    if (rho_s0 <= 0.0 || rho_s0 > 1.0)
        throw std::invalid_argument("EvolutionParams: rho_s0 must be in (0, 1]");
    if (von_mises_k_tx <= 0.0 || von_mises_k_rx <= 0.0 || von_mises_k_intra <= 0.0)
        throw std::invalid_argument("EvolutionParams: Von Mises concentrations must be positive");
    if (mean_rays_per_cluster <= 0.0)
        throw std::invalid_argument("EvolutionParams: mean rays per cluster must be positive");
    if (mean_virtual_delay_s <= 0.0 || mean_intra_delay_s <= 0.0)
        throw std::invalid_argument("EvolutionParams: delay means must be positive");
    if (intra_power_decay <= 1.0)
        throw std::invalid_argument("EvolutionParams: intra power decay must exceed 1");
    if (per_ray_shadow_sigma_db < 0.0)
        throw std::invalid_argument("EvolutionParams: shadow sigma must be non-negative");
    if (birth_scale <= 0.0)
        throw std::invalid_argument("EvolutionParams: birth scale must be positive");
}

double survival_probability(double dt, double speed, const EvolutionParams &params)
{
    if (dt < 0.0)
        throw std::invalid_argument("survival_probability: dt must be non-negative");
    return std::exp(-params.death_rate_per_m * speed * dt / params.correlation_distance_m);
}

double scattering_coefficient(double roughness_m, double mean_elevation, double wavelength)
{
    if (wavelength <= 0.0)
        throw std::invalid_argument("scattering_coefficient: wavelength must be positive");
    const double ratio = std::numbers::pi * roughness_m * std::cos(mean_elevation) / wavelength;
    return std::exp(-8.0 * ratio * ratio);
}

double mean_new_clusters(double survival, double los_distance, double initial_distance,
                         double rho_s, const EvolutionParams &params)
{
    if (los_distance < 0.0)
        throw std::invalid_argument("mean_new_clusters: negative LoS distance");
    double waveguide = 1.0;
    if (params.waveguide_enabled) {
        waveguide = 1.0 - los_distance / initial_distance;
        waveguide = std::clamp(waveguide, 0.0, 1.0);
    }
    const double mean = params.birth_rate_per_m / params.death_rate_per_m * (1.0 - survival) *
                        waveguide * (rho_s / params.rho_s0) * params.birth_scale;
    return std::max(mean, 0.0);
}

std::vector<double> eam_discretize(std::size_t ray_count, double kappa)
{
    if (ray_count == 0)
        throw std::invalid_argument("eam_discretize: ray count must be positive");
    if (kappa <= 0.0)
        throw std::invalid_argument("eam_discretize: kappa must be positive");

    // Quantiles depend only on (count, kappa); memoize since clusters are
    // born continuously with the same concentrations.
    static std::mutex cache_mutex;
    static std::map<std::pair<std::size_t, double>, std::vector<double>> cache;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find({ray_count, kappa});
        if (it != cache.end())
            return it->second;
    }

    VonMisesCdf dist(kappa);
    std::vector<double> offsets(ray_count, 0.0);
    // Fill the lower half and mirror; this keeps the set exactly symmetric.
    for (std::size_t l = 0; 2 * (l + 1) <= ray_count; ++l) {
        const double p = (static_cast<double>(l) + 0.5) / static_cast<double>(ray_count);
        const double q = dist.quantile(p);
        offsets[l] = q;
        offsets[ray_count - 1 - l] = -q;
    }
    // Odd counts keep the central offset at the median, exactly 0.

    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(std::make_pair(ray_count, kappa), offsets);
    return offsets;
}

std::vector<double> ray_powers(const std::vector<double> &delay_offsets,
                               const EvolutionParams &params, RngStream &rng)
{
    const double r_tau = params.intra_power_decay;
    std::vector<double> weights;
    weights.reserve(delay_offsets.size());
    for (double tau : delay_offsets) {
        double w = std::exp(-tau * (r_tau - 1.0) / (r_tau * params.mean_intra_delay_s));
        if (params.per_ray_shadow_sigma_db > 0.0) {
            const double z = rng.normal(0.0, params.per_ray_shadow_sigma_db);
            w *= std::pow(10.0, -z / 10.0);
        }
        weights.push_back(w);
    }
    return weights;
}

double update_virtual_delay(double virtual_delay, double dt, double relaxation, double x)
{
    if (dt < 0.0)
        throw std::invalid_argument("update_virtual_delay: dt must be non-negative");
    if (relaxation <= 0.0)
        throw std::invalid_argument("update_virtual_delay: relaxation must be positive");
    const double keep = std::exp(-dt / relaxation);
    return keep * virtual_delay + (1.0 - keep) * x;
}

double update_cluster_delay(double rx_leg_norm, double tx_leg_norm, double virtual_delay_next)
{
    if (rx_leg_norm < 0.0 || tx_leg_norm < 0.0)
        throw std::invalid_argument("update_cluster_delay: negative leg norm");
    return (rx_leg_norm + tx_leg_norm) / kSpeedOfLight + virtual_delay_next;
}

double update_ray_power(double weight, double tau_old, double tau_new, double delay_offset)
{
    const double denom = tau_old + delay_offset;
    if (denom <= 0.0)
        throw std::invalid_argument("update_ray_power: tau_old + delay_offset must be positive");
    const double factor = (3.0 * tau_old - 2.0 * tau_new + delay_offset) / denom;
    return std::max(weight * factor, 0.0);
}

double mean_rx_elevation(const std::vector<Cluster> &clusters)
{
    if (clusters.empty())
        return 0.0;
    double sum = 0.0;
    for (const Cluster &c : clusters)
        sum += c.rx_elevation;
    return sum / static_cast<double>(clusters.size());
}

double total_power(const std::vector<Cluster> &clusters)
{
    double sum = 0.0;
    for (const Cluster &c : clusters)
        for (const Ray &r : c.rays)
            sum += r.power;
    return sum;
}

void normalize_powers(std::vector<Cluster> &clusters)
{
    double total = 0.0;
    for (const Cluster &c : clusters)
        for (const Ray &r : c.rays)
            total += r.weight;
    if (total <= 0.0)
        return;
    for (Cluster &c : clusters)
        for (Ray &r : c.rays)
            r.power = r.weight / total;
}

namespace {

struct ClusterGeometry {
    Vec3 tx_center;
    Vec3 rx_center;
    RayAngles los_at_tx;
    RayAngles los_at_rx;
};

ClusterGeometry current_geometry(const TubeScene &scene, const MotionState &motion)
{
    ClusterGeometry g;
    g.tx_center = scene.tx_reference;
    g.rx_center = advance_rx(scene.rx_initial, motion.velocity, motion.time);
    const Vec3 tx_to_rx = g.rx_center - g.tx_center;
    g.los_at_tx = direction_angles(tx_to_rx);
    g.los_at_rx = direction_angles(-tx_to_rx);
    return g;
}

// Shuffles offsets in place (Fisher-Yates on the stream) so azimuth and
// elevation offsets are randomly coupled rather than rank-correlated.
void shuffle_offsets(std::vector<double> &offsets, RngStream &rng)
{
    for (std::size_t i = offsets.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
        std::swap(offsets[i - 1], offsets[std::min(j, i - 1)]);
    }
}

bool anchors_valid(const Cluster &cluster, const TubeScene &scene, const ClusterGeometry &geom,
                   double max_wall_distance)
{
    const auto leg_ok = [&](const Vec3 &anchor, const Vec3 &frame_center) {
        const double reach = norm(anchor - frame_center);
        return std::isfinite(reach) && reach <= max_wall_distance;
    };
    const Vec3 tx_frame{geom.tx_center.x, geom.tx_center.y, scene.axis_height};
    const Vec3 rx_frame = tx_frame + (geom.rx_center - geom.tx_center);
    if (!leg_ok(cluster.wall_tx, tx_frame) || !leg_ok(cluster.wall_rx, rx_frame))
        return false;
    for (const Ray &ray : cluster.rays) {
        if (!leg_ok(ray.wall_tx, tx_frame) || !leg_ok(ray.wall_rx, rx_frame))
            return false;
        // A bounce point falling exactly onto an array makes the Doppler
        // projection undefined.
        if (norm(ray.wall_tx - geom.tx_center) < 1e-6 || norm(ray.wall_rx - geom.rx_center) < 1e-6)
            return false;
    }
    return true;
}

Cluster draw_cluster(const TubeScene &scene, const ClusterGeometry &geom,
                     const EvolutionParams &params, const MotionState &motion, RngStream &rng)
{
    Cluster cluster;
    cluster.birth_time = motion.time;
    cluster.tx_azimuth = rng.von_mises(geom.los_at_tx.azimuth, params.von_mises_k_tx);
    cluster.tx_elevation = rng.von_mises(geom.los_at_tx.elevation, params.von_mises_k_tx);
    cluster.rx_azimuth = rng.von_mises(geom.los_at_rx.azimuth, params.von_mises_k_rx);
    cluster.rx_elevation = rng.von_mises(geom.los_at_rx.elevation, params.von_mises_k_rx);
    cluster.virtual_delay = rng.exponential(params.mean_virtual_delay_s);
    cluster.virtual_distance = cluster.virtual_delay * kSpeedOfLight;

    cluster.wall_tx = wall_anchor_tx({cluster.tx_azimuth, cluster.tx_elevation}, scene,
                                     geom.tx_center);
    cluster.wall_rx = wall_anchor_rx({cluster.rx_azimuth, cluster.rx_elevation}, scene,
                                     geom.tx_center, geom.rx_center);
    cluster.delay = update_cluster_delay(norm(cluster.wall_rx - geom.rx_center),
                                         norm(cluster.wall_tx - geom.tx_center),
                                         cluster.virtual_delay);

    const auto ray_count =
        std::max<std::uint64_t>(1, rng.poisson(params.mean_rays_per_cluster));

    std::vector<double> tx_az = eam_discretize(ray_count, params.von_mises_k_intra);
    std::vector<double> tx_el = tx_az;
    std::vector<double> rx_az = tx_az;
    std::vector<double> rx_el = tx_az;
    shuffle_offsets(tx_el, rng);
    shuffle_offsets(rx_az, rng);
    shuffle_offsets(rx_el, rng);

    std::vector<double> delay_offsets;
    delay_offsets.reserve(ray_count);
    for (std::uint64_t l = 0; l < ray_count; ++l)
        delay_offsets.push_back(rng.exponential(params.mean_intra_delay_s));
    std::vector<double> weights = ray_powers(delay_offsets, params, rng);

    cluster.rays.reserve(ray_count);
    for (std::uint64_t l = 0; l < ray_count; ++l) {
        Ray ray;
        ray.tx_azimuth = cluster.tx_azimuth + tx_az[l];
        ray.tx_elevation = cluster.tx_elevation + tx_el[l];
        ray.rx_azimuth = cluster.rx_azimuth + rx_az[l];
        ray.rx_elevation = cluster.rx_elevation + rx_el[l];
        ray.delay_offset = delay_offsets[l];
        ray.weight = weights[l];
        ray.phase = 2.0 * std::numbers::pi * rng.uniform01();
        ray.wall_tx = wall_anchor_tx({ray.tx_azimuth, ray.tx_elevation}, scene, geom.tx_center);
        ray.wall_rx = wall_anchor_rx({ray.rx_azimuth, ray.rx_elevation}, scene, geom.tx_center,
                                     geom.rx_center);
        cluster.rays.push_back(ray);
    }
    return cluster;
}

double wall_distance_cap(const TubeScene &scene, const EvolutionParams &params)
{
    return params.max_wall_distance_m > 0.0 ? params.max_wall_distance_m
                                            : scene.initial_distance();
}

} // namespace

Cluster sample_new_cluster(const TubeScene &scene, const MotionState &motion,
                           const EvolutionParams &params, RngStream &rng)
{
    const ClusterGeometry geom = current_geometry(scene, motion);
    const double cap = wall_distance_cap(scene, params);

    // Near-axial draws put the bounce far outside the link segment (the wall
    // scale factor diverges); reject and redraw.
    for (int attempt = 0; attempt < 256; ++attempt) {
        try {
            Cluster cluster = draw_cluster(scene, geom, params, motion, rng);
            if (anchors_valid(cluster, scene, geom, cap))
                return cluster;
        } catch (const NoWallIntersectionError &) {
            // axis-parallel draw, retry
        }
    }
    throw std::runtime_error("sample_new_cluster: no valid cluster in 256 attempts");
}

std::vector<Cluster> evolve_step(std::vector<Cluster> state, double dt, const TubeScene &scene,
                                 const MotionState &motion, const EvolutionParams &params,
                                 double wavelength, RngStream &rng, std::uint64_t &next_id)
{
    if (dt <= 0.0)
        throw std::invalid_argument("evolve_step: dt must be positive");

    const double speed = norm(motion.velocity);
    const double survival = survival_probability(dt, speed, params);
    const ClusterGeometry geom = current_geometry(scene, motion);

    // Survival draws, then delay and power updates for the survivors.
    std::vector<Cluster> next;
    next.reserve(state.size());
    for (Cluster &cluster : state) {
        if (rng.uniform01() > survival)
            continue;
        const double tau_old = cluster.delay;
        const double x = rng.exponential(params.mean_virtual_delay_s);
        cluster.virtual_delay =
            update_virtual_delay(cluster.virtual_delay, dt, params.delay_relaxation_s, x);
        cluster.delay = update_cluster_delay(norm(cluster.wall_rx - geom.rx_center),
                                             norm(cluster.wall_tx - geom.tx_center),
                                             cluster.virtual_delay);
        for (Ray &ray : cluster.rays)
            ray.weight = update_ray_power(ray.weight, tau_old, cluster.delay, ray.delay_offset);
        next.push_back(std::move(cluster));
    }

    // Births. The scattering coefficient follows the alive set's mean Rx
    // elevation; an empty set falls back to 0.
    const double rho_s =
        scattering_coefficient(params.roughness_m, mean_rx_elevation(next), wavelength);
    const double los_distance = norm(geom.rx_center - geom.tx_center);
    const double mean_births =
        mean_new_clusters(survival, los_distance, scene.initial_distance(), rho_s, params);
    const std::uint64_t births = rng.poisson(mean_births);
    for (std::uint64_t i = 0; i < births; ++i) {
        Cluster cluster = sample_new_cluster(scene, motion, params, rng);
        cluster.id = next_id++;
        next.push_back(std::move(cluster));
    }

    normalize_powers(next);
    return next;
}

std::vector<Cluster> cold_start(const TubeScene &scene, const MotionState &motion,
                                const EvolutionParams &params, double wavelength, RngStream &rng,
                                std::uint64_t &next_id)
{
    const double rho_s = scattering_coefficient(params.roughness_m, 0.0, wavelength);
    const double mean = params.birth_rate_per_m / params.death_rate_per_m *
                        (rho_s / params.rho_s0) * params.birth_scale;
    const std::uint64_t count = rng.poisson(mean);
    std::vector<Cluster> clusters;
    clusters.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Cluster cluster = sample_new_cluster(scene, motion, params, rng);
        cluster.id = next_id++;
        clusters.push_back(std::move(cluster));
    }
    normalize_powers(clusters);
    return clusters;
}

} // namespace tubechan

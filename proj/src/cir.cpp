// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/cir.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "tubechan/errors.hpp"

namespace tubechan {

namespace {
constexpr std::complex<double> kJ{0.0, 1.0};
}

RicianModel RicianModel::from_db(double k_db) { return {std::pow(10.0, k_db / 10.0)}; }

AntennaArray ModelState::tx_array() const
{
    return make_linear_array(tx_center(), arrays.tx_count, arrays.spacing);
}

AntennaArray ModelState::rx_array() const
{
    return make_linear_array(rx_center(), arrays.rx_count, arrays.spacing);
}

std::complex<double> los_coefficient(double k_linear, const Vec3 &d_los, const Vec3 &velocity,
                                     double wavelength, double t)
{
    if (k_linear < 0.0)
        throw std::invalid_argument("los_coefficient: K must be non-negative");
    const double distance = norm(d_los);
    if (distance <= 0.0)
        throw DegenerateGeometryError("los_coefficient: zero LoS distance");
    const double doppler = los_doppler(d_los, velocity, wavelength);
    const double amplitude = std::sqrt(k_linear / (k_linear + 1.0));
    return amplitude * std::exp(-kJ * (2.0 * std::numbers::pi * distance / wavelength)) *
           std::exp(kJ * (2.0 * std::numbers::pi * doppler * t));
}

std::complex<double> nlos_coefficient(double ray_power, double k_linear, double phase,
                                      double total_distance, double doppler, double wavelength,
                                      double t)
{
    if (ray_power < 0.0)
        throw std::invalid_argument("nlos_coefficient: ray power must be non-negative");
    const double amplitude = std::sqrt(ray_power / (k_linear + 1.0));
    const double geo_phase = phase - 2.0 * std::numbers::pi * total_distance / wavelength;
    return amplitude * std::exp(kJ * geo_phase) *
           std::exp(kJ * (2.0 * std::numbers::pi * doppler * t));
}

ChannelSnapshot assemble_cir(const ModelState &state)
{
    const double t = state.motion.time;
    const double lambda = state.wavelength;
    const AntennaArray tx = state.tx_array();
    const AntennaArray rx = state.rx_array();

    ChannelSnapshot snapshot;
    snapshot.time = t;
    snapshot.tx_count = tx.element_count;
    snapshot.rx_count = rx.element_count;
    snapshot.entries.resize(tx.element_count * rx.element_count);

    for (std::size_t p = 0; p < tx.element_count; ++p) {
        const Vec3 &tx_el = tx.element_positions[p];
        for (std::size_t q = 0; q < rx.element_count; ++q) {
            const Vec3 &rx_el = rx.element_positions[q];
            auto &taps = snapshot.entries[p * rx.element_count + q];
            taps.reserve(1 + state.clusters.size() * 8);

            // LoS tap.
            const Vec3 d_los = los_vector(tx_el, rx_el);
            PathComponent los;
            los.amplitude =
                los_coefficient(state.rician.k_linear, d_los, state.motion.velocity, lambda, t);
            los.delay = los_delay(d_los);
            los.doppler = los_doppler(d_los, state.motion.velocity, lambda);
            los.is_los = true;
            taps.push_back(los);

            // One tap per ray. Tap delays are cluster-level (mean angles);
            // phases and Doppler use the per-ray bounce anchors.
            for (const Cluster &cluster : state.clusters) {
                for (std::size_t l = 0; l < cluster.rays.size(); ++l) {
                    const Ray &ray = cluster.rays[l];
                    const Vec3 d_tx = ray.wall_tx - tx_el;
                    const Vec3 d_rx = ray.wall_rx - rx_el;
                    // Phase path length: the virtual link distance is the
                    // birth value; delay drift does not re-randomize phases.
                    const double total_distance =
                        norm(d_tx) + norm(d_rx) + cluster.virtual_distance;
                    const double doppler = los_doppler(d_rx, state.motion.velocity, lambda);

                    PathComponent tap;
                    tap.amplitude = nlos_coefficient(ray.power, state.rician.k_linear, ray.phase,
                                                     total_distance, doppler, lambda, t);
                    tap.delay = cluster.delay + ray.delay_offset;
                    tap.doppler = doppler;
                    tap.is_los = false;
                    tap.cluster_id = cluster.id;
                    tap.ray_index = static_cast<std::uint32_t>(l);
                    taps.push_back(tap);
                }
            }
        }
    }
    return snapshot;
}

std::vector<std::complex<double>> transfer_function(const ChannelSnapshot &snapshot,
                                                    std::size_t p, std::size_t q,
                                                    const std::vector<double> &frequencies)
{
    const auto &taps = snapshot.at(p, q);
    std::vector<std::complex<double>> h(frequencies.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        std::complex<double> sum{0.0, 0.0};
        for (const PathComponent &tap : taps)
            sum += tap.amplitude *
                   std::exp(-kJ * (2.0 * std::numbers::pi * tap.delay * frequencies[i]));
        h[i] = sum;
    }
    return h;
}

LargeScaleGain composite_gain(GainModel model, double distance, double wavelength,
                              double shadow_sigma_db, RngStream *rng)
{
    LargeScaleGain gain;
    if (model == GainModel::unity)
        return gain;
    if (distance <= 0.0)
        throw DegenerateGeometryError("composite_gain: distance must be positive");
    if (wavelength <= 0.0)
        throw std::invalid_argument("composite_gain: wavelength must be positive");
    gain.path_loss_db = 20.0 * std::log10(4.0 * std::numbers::pi * distance / wavelength);
    if (shadow_sigma_db > 0.0) {
        if (rng == nullptr)
            throw std::invalid_argument("composite_gain: shadowing requires an RNG");
        gain.shadowing_db = rng->normal(0.0, shadow_sigma_db);
    }
    // Blockage and absorption stay at 0 dB until calibrated models exist.
    return gain;
}

std::uint64_t snapshot_digest(const ChannelSnapshot &snapshot)
{
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    const auto mix = [&hash](std::uint64_t bits) {
        for (int i = 0; i < 8; ++i) {
            hash ^= (bits >> (8 * i)) & 0xFF;
            hash *= 0x100000001B3ULL;
        }
    };
    const auto mix_double = [&](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    };
    mix_double(snapshot.time);
    mix(snapshot.tx_count);
    mix(snapshot.rx_count);
    for (const auto &taps : snapshot.entries) {
        mix(taps.size());
        for (const PathComponent &tap : taps) {
            mix_double(tap.amplitude.real());
            mix_double(tap.amplitude.imag());
            mix_double(tap.delay);
            mix_double(tap.doppler);
            mix(tap.is_los ? 1 : 0);
        }
    }
    return hash;
}

} // namespace tubechan

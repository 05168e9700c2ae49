// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "tubechan/cir.hpp"
#include "tubechan/errors.hpp"
#include "tubechan/rng.hpp"

using namespace tubechan;

namespace {

constexpr double kLambda = 5.1688e-3;

ModelState make_state(double k_db, std::uint64_t seed, bool with_clusters)
{
    ModelState state;
    state.scene.radius = 2.0;
    state.scene.axis_height = 2.0;
    state.scene.tx_reference = {0.0, 0.0, 4.0};
    state.scene.rx_initial = {600.0, 0.0, 3.0};
    state.arrays = {2, 2, kLambda};
    state.motion = {{-300.0, 0.0, 0.0}, 0.0};
    state.rician = RicianModel::from_db(k_db);
    state.wavelength = kLambda;
    if (with_clusters) {
        EvolutionParams params;
        RngStream rng(seed, 0);
        std::uint64_t next_id = 0;
        state.clusters =
            cold_start(state.scene, state.motion, params, kLambda, rng, next_id);
    }
    return state;
}

double tap_power_sum(const ChannelSnapshot &snapshot, std::size_t p, std::size_t q)
{
    double sum = 0.0;
    for (const PathComponent &tap : snapshot.at(p, q))
        sum += std::norm(tap.amplitude);
    return sum;
}

} // namespace

TEST_CASE("los_coefficient")
{
    const Vec3 d{600.0, 0.0, -1.0};
    const Vec3 v{-300.0, 0.0, 0.0};

    // Pure-LoS limit has unit magnitude; K = 1 splits power evenly.
    CHECK(std::abs(los_coefficient(1e12, d, v, kLambda, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(los_coefficient(1.0, d, v, kLambda, 0.0)) ==
          doctest::Approx(0.70711).epsilon(1e-5));

    // Whole wavelengths give zero phase at t = 0.
    const Vec3 whole{100.0 * kLambda, 0.0, 0.0};
    CHECK(std::arg(los_coefficient(1.0, whole, v, kLambda, 0.0)) ==
          doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(los_coefficient(1.0, Vec3{}, v, kLambda, 0.0), DegenerateGeometryError);
}

TEST_CASE("nlos_coefficient")
{
    CHECK(std::abs(nlos_coefficient(0.0, 1.0, 0.3, 600.0, 1e4, kLambda, 0.0)) == 0.0);
    CHECK(std::abs(nlos_coefficient(0.1, 1.0, 0.3, 600.0, 1e4, kLambda, 0.0)) ==
          doctest::Approx(0.22361).epsilon(1e-4));

    // Rician decomposition: LoS power + scattered powers add to one.
    const double k = 3.0;
    double sum = std::norm(los_coefficient(k, {600.0, 0.0, -1.0}, {-300.0, 0.0, 0.0},
                                           kLambda, 0.0));
    const double powers[] = {0.4, 0.35, 0.25};
    for (double p : powers)
        sum += std::norm(nlos_coefficient(p, k, 1.0, 612.0, 2e4, kLambda, 0.0));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assemble_cir")
{
    SUBCASE("zero clusters leave only the LoS tap")
    {
        const ModelState state = make_state(6.0, 1, false);
        const ChannelSnapshot snapshot = assemble_cir(state);
        REQUIRE(snapshot.entries.size() == 4);
        for (std::size_t p = 0; p < 2; ++p)
            for (std::size_t q = 0; q < 2; ++q) {
                REQUIRE(snapshot.at(p, q).size() == 1);
                CHECK(snapshot.at(p, q)[0].is_los);
            }
    }
    SUBCASE("tap power sums to one per antenna pair")
    {
        const ModelState state = make_state(-5.0, 2, true);
        REQUIRE(!state.clusters.empty());
        const ChannelSnapshot snapshot = assemble_cir(state);
        for (std::size_t p = 0; p < 2; ++p)
            for (std::size_t q = 0; q < 2; ++q)
                CHECK(std::abs(tap_power_sum(snapshot, p, q) - 1.0) < 1e-9);
    }
    SUBCASE("component counts match the cluster structure")
    {
        const ModelState state = make_state(-5.0, 3, true);
        std::size_t rays = 0;
        for (const Cluster &c : state.clusters)
            rays += c.rays.size();
        const ChannelSnapshot snapshot = assemble_cir(state);
        CHECK(snapshot.at(1, 1).size() == rays + 1);
    }
    SUBCASE("LoS phase difference across the array matches the geometry")
    {
        const ModelState state = make_state(6.0, 4, false);
        const ChannelSnapshot snapshot = assemble_cir(state);
        const auto &a = snapshot.at(0, 0)[0];
        const auto &b = snapshot.at(0, 1)[0];

        // Independent geometry oracle for the two LoS path lengths.
        const AntennaArray tx = state.tx_array();
        const AntennaArray rx = state.rx_array();
        const double d1 = norm(rx.element_positions[0] - tx.element_positions[0]);
        const double d2 = norm(rx.element_positions[1] - tx.element_positions[0]);
        const double want = 2.0 * std::numbers::pi * (d1 - d2) / kLambda;
        // arg(b * conj(a)) = (-2 pi d2 / lambda) - (-2 pi d1 / lambda).
        const double got = std::arg(b.amplitude * std::conj(a.amplitude));
        CHECK(std::abs(std::remainder(got - want, 2.0 * std::numbers::pi)) < 1e-6);
    }
}

TEST_CASE("transfer_function")
{
    SUBCASE("single tap is flat in magnitude with linear phase")
    {
        ChannelSnapshot snapshot;
        snapshot.tx_count = 1;
        snapshot.rx_count = 1;
        PathComponent tap;
        tap.amplitude = {0.6, 0.3};
        tap.delay = 1e-7;
        snapshot.entries = {{tap}};

        std::vector<double> freqs;
        for (int i = 0; i < 64; ++i)
            freqs.push_back(1e6 * i);
        const auto h = transfer_function(snapshot, 0, 0, freqs);

        for (const auto &v : h)
            CHECK(std::abs(v) == doctest::Approx(std::abs(tap.amplitude)).epsilon(1e-12));

        // Finite-difference phase slope equals -2 pi tau within 0.1%.
        const double df = freqs[1] - freqs[0];
        const double slope =
            std::arg(h[1] * std::conj(h[0])) / df; // one step, unwrapped by construction
        CHECK(slope == doctest::Approx(-2.0 * std::numbers::pi * tap.delay).epsilon(1e-3));
    }
    SUBCASE("zero frequency returns the amplitude sum")
    {
        const ModelState state = make_state(-5.0, 5, true);
        const ChannelSnapshot snapshot = assemble_cir(state);
        const auto h = transfer_function(snapshot, 0, 0, {0.0});
        std::complex<double> want{0.0, 0.0};
        for (const PathComponent &tap : snapshot.at(0, 0))
            want += tap.amplitude;
        CHECK(std::abs(h[0] - want) < 1e-12);
    }
    SUBCASE("linear in the tap amplitudes")
    {
        ModelState state = make_state(-5.0, 6, true);
        ChannelSnapshot snapshot = assemble_cir(state);
        std::vector<double> freqs{0.0, 1e6, 5e6};
        const auto h1 = transfer_function(snapshot, 0, 0, freqs);
        for (auto &tap : snapshot.entries[0])
            tap.amplitude *= 2.5;
        const auto h2 = transfer_function(snapshot, 0, 0, freqs);
        for (std::size_t i = 0; i < freqs.size(); ++i)
            CHECK(std::abs(h2[i] - 2.5 * h1[i]) < 1e-12);
    }
    SUBCASE("Parseval on a wide uniform grid")
    {
        ChannelSnapshot snapshot;
        snapshot.tx_count = 1;
        snapshot.rx_count = 1;
        snapshot.entries.resize(1);
        const double delays[] = {0.0, 7e-9, 23e-9};
        const double powers[] = {0.5, 0.3, 0.2};
        for (int i = 0; i < 3; ++i) {
            PathComponent tap;
            tap.amplitude = std::sqrt(powers[i]);
            tap.delay = delays[i];
            snapshot.entries[0].push_back(tap);
        }
        // Span 100 / (7 ns minimum separation).
        const double span = 100.0 / 7e-9;
        std::vector<double> freqs;
        const int n = 4096;
        for (int i = 0; i < n; ++i)
            freqs.push_back(span * i / n);
        const auto h = transfer_function(snapshot, 0, 0, freqs);
        double mean = 0.0;
        for (const auto &v : h)
            mean += std::norm(v);
        mean /= n;
        CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("doppler consistency of the LoS component")
{
    // The printed Doppler term and the time-varying distance phase rotate in
    // opposite directions, so the Doppler factor is checked after removing
    // the known distance phase.
    const ModelState base = make_state(6.0, 7, false);
    const double dt = 1e-7;
    const double t0 = 2e-4;

    const auto los_doppler_factor = [&](double t) {
        ModelState state = base;
        state.motion.time = t;
        const ChannelSnapshot snap = assemble_cir(state);
        const PathComponent &tap = snap.at(0, 0)[0];
        const double distance = tap.delay * kSpeedOfLight;
        return tap.amplitude *
               std::exp(std::complex<double>(0.0, 2.0 * std::numbers::pi * distance / kLambda));
    };

    const double phase_rate =
        std::arg(los_doppler_factor(t0 + dt) * std::conj(los_doppler_factor(t0))) /
        (2.0 * std::numbers::pi * dt);

    ModelState state = base;
    state.motion.time = t0;
    const ChannelSnapshot snap = assemble_cir(state);
    const double f_los = snap.at(0, 0)[0].doppler;
    CHECK(phase_rate == doctest::Approx(f_los).epsilon(1e-3));
}

TEST_CASE("composite_gain")
{
    const double d_ref = kLambda / (4.0 * std::numbers::pi);
    const LargeScaleGain at_ref = composite_gain(GainModel::free_space_lognormal, d_ref, kLambda);
    CHECK(at_ref.path_loss_db == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at_ref.shadowing_db == 0.0);
    CHECK(at_ref.blockage_db == 0.0);
    CHECK(at_ref.absorption_db == 0.0);

    // Doubling the distance adds 20 log10(2) dB.
    const LargeScaleGain g1 = composite_gain(GainModel::free_space_lognormal, 300.0, kLambda);
    const LargeScaleGain g2 = composite_gain(GainModel::free_space_lognormal, 600.0, kLambda);
    CHECK(g2.path_loss_db - g1.path_loss_db == doctest::Approx(6.0206).epsilon(1e-4));

    // Unity model reports all zeros; amplitude factor is 1.
    const LargeScaleGain unity = composite_gain(GainModel::unity, 600.0, kLambda);
    CHECK(unity.total_db() == 0.0);
    CHECK(unity.amplitude_factor() == 1.0);

    // Shadowing needs an RNG and is reproducible from the stream.
    RngStream rng(8, 0);
    const LargeScaleGain sh = composite_gain(GainModel::free_space_lognormal, 600.0, kLambda,
                                             4.0, &rng);
    RngStream rng2(8, 0);
    const LargeScaleGain sh2 = composite_gain(GainModel::free_space_lognormal, 600.0, kLambda,
                                              4.0, &rng2);
    CHECK(sh.shadowing_db == sh2.shadowing_db);
    CHECK(sh.shadowing_db != 0.0);

    CHECK_THROWS_AS(composite_gain(GainModel::free_space_lognormal, 0.0, kLambda),
                    DegenerateGeometryError);
    CHECK_THROWS_AS(composite_gain(GainModel::free_space_lognormal, 600.0, kLambda, 4.0),
                    std::invalid_argument);
}

TEST_CASE("rician model conversion")
{
    CHECK(RicianModel::from_db(0.0).k_linear == doctest::Approx(1.0));
    CHECK(RicianModel::from_db(6.0).k_linear == doctest::Approx(3.98107).epsilon(1e-5));
    const RicianModel m = RicianModel::from_db(-5.0);
    CHECK(m.los_fraction() + m.nlos_fraction() == doctest::Approx(1.0).epsilon(1e-15));
}

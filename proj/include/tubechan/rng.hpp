// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <cstdint>
#include <random>

namespace tubechan {

/// Derives the engine seed of stream `index` from a master seed.
///
/// Construction: one SplitMix64 finalizer step applied to
/// master_seed + (index + 1) * 0x9E3779B97F4A7C15 (golden-gamma counter).
/// Streams built from the same (master, index) pair are identical; distinct
/// indices give statistically independent mt19937_64 sequences.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index);

// Explicit per-realization random stream. All samplers are defined directly
// on top of the raw 64-bit engine output so that draw sequences depend only
// on (master_seed, stream_index), not on the standard library version.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : engine_(derive_stream_seed(master_seed, stream_index))
    {
    }

    std::uint64_t raw() { return engine_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inverse-CDF exponential with the given mean.
    double exponential(double mean);

    // Box-Muller normal; draws exactly two uniforms per call.
    double normal(double mean, double sigma);

    // Exact Poisson sampler by unit-rate arrival counting, O(mean) per draw.
    std::uint64_t poisson(double mean);

    // Von Mises angle around `mu` with concentration `kappa`, wrapped to
    // (-pi, pi] relative shift (Best-Fisher rejection sampler).
    double von_mises(double mu, double kappa);

  private:
    std::mt19937_64 engine_;
};

} // namespace tubechan

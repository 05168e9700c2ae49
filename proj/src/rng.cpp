// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tubechan {

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index)
{
    // SplitMix64 finalizer on a golden-gamma counter.
    std::uint64_t z = master_seed + (stream_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double RngStream::exponential(double mean)
{
    if (mean <= 0.0)
        throw std::invalid_argument("exponential: mean must be positive");
    return -mean * std::log1p(-uniform01());
}

double RngStream::normal(double mean, double sigma)
{
    double u1 = uniform01();
    double u2 = uniform01();
    // Guard the log singularity at u1 == 0.
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::poisson(double mean)
{
    if (mean < 0.0)
        throw std::invalid_argument("poisson: mean must be non-negative");
    if (mean == 0.0)
        return 0;
    // Count unit-rate exponential arrivals inside [0, mean].
    std::uint64_t count = 0;
    double s = -std::log1p(-uniform01());
    while (s <= mean) {
        ++count;
        s += -std::log1p(-uniform01());
    }
    return count;
}

double RngStream::von_mises(double mu, double kappa)
{
    if (kappa < 0.0)
        throw std::invalid_argument("von_mises: kappa must be non-negative");
    if (kappa < 1e-8)
        return std::remainder(mu + std::numbers::pi * (2.0 * uniform01() - 1.0),
                              2.0 * std::numbers::pi);

    // Best & Fisher (1979) wrapped-Cauchy envelope rejection.
    const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
    const double r = (1.0 + b * b) / (2.0 * b);

    for (;;) {
        const double u1 = uniform01();
        const double u2 = uniform01();

        const double z = std::cos(std::numbers::pi * u1);
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);

        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double u3 = uniform01();
            const double sign = (u3 < 0.5) ? -1.0 : 1.0;
            return std::remainder(mu + sign * std::acos(f), 2.0 * std::numbers::pi);
        }
    }
}

} // namespace tubechan

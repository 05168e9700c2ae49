// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "test_oracles.hpp"
#include "tubechan/rng.hpp"
#include "tubechan/vonmises.hpp"

using namespace tubechan;

TEST_CASE("streams are reproducible")
{
    RngStream a(42, 3);
    RngStream b(42, 3);
    for (int i = 0; i < 100; ++i)
        CHECK(a.raw() == b.raw());

    // Distinct indices or seeds give distinct sequences.
    RngStream c(42, 4);
    RngStream d(43, 3);
    CHECK(RngStream(42, 3).raw() != c.raw());
    CHECK(RngStream(42, 3).raw() != d.raw());
}

TEST_CASE("adjacent streams are uncorrelated")
{
    RngStream a(7, 0);
    RngStream b(7, 1);
    const int n = 10000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = a.uniform01();
        const double y = b.uniform01();
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double var_x = sxx / n - (sx / n) * (sx / n);
    const double var_y = syy / n - (sy / n) * (sy / n);
    CHECK(std::abs(cov / std::sqrt(var_x * var_y)) < 0.05);
}

TEST_CASE("uniform01 range and mean")
{
    RngStream rng(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("exponential sampler mean")
{
    RngStream rng(2, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        sum += rng.exponential(2.0);
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.03));
    CHECK_THROWS_AS(rng.exponential(0.0), std::invalid_argument);
}

TEST_CASE("normal sampler moments")
{
    RngStream rng(3, 0);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(1.0, 2.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("poisson sampler")
{
    RngStream rng(4, 0);
    CHECK(rng.poisson(0.0) == 0);

    const int n = 50000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(rng.poisson(4.0));
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(4.0).epsilon(0.03));
    // For a Poisson process the variance equals the mean.
    CHECK(var / mean == doctest::Approx(1.0).epsilon(0.05));

    // Large means still work (arrival counting has no underflow regime).
    double big = 0.0;
    for (int i = 0; i < 2000; ++i)
        big += static_cast<double>(rng.poisson(800.0));
    CHECK(big / 2000 == doctest::Approx(800.0).epsilon(0.01));
}

TEST_CASE("von mises sampler matches the density")
{
    const double kappa = 6.0;
    RngStream rng(9, 0);
    const int n = 100000;
    const int bins = 40;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double x = rng.von_mises(0.0, kappa);
        int b = static_cast<int>((x + std::numbers::pi) / (2.0 * std::numbers::pi) * bins);
        if (b == bins)
            b = bins - 1;
        ++counts[b];
    }
    // Expected bin masses from the CDF; chi-square at the 1% level.
    VonMisesCdf dist(kappa);
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double lo = -std::numbers::pi + 2.0 * std::numbers::pi * b / bins;
        const double hi = lo + 2.0 * std::numbers::pi / bins;
        const double expected = n * (dist.cdf(hi) - dist.cdf(lo));
        if (expected < 1e-9)
            continue;
        const double diff = counts[b] - expected;
        chi2 += diff * diff / expected;
    }
    // Critical value of chi-square with 39 dof at 1%: 62.43.
    CHECK(chi2 < 62.43);
}

TEST_CASE("von mises degenerate limits")
{
    RngStream rng(10, 0);
    // Very high concentration collapses onto the mean.
    for (int i = 0; i < 200; ++i)
        CHECK(std::abs(rng.von_mises(0.7, 1e8) - 0.7) < 1e-3);
    // Zero concentration is uniform on (-pi, pi].
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double x = rng.von_mises(0.0, 0.0);
        CHECK(x <= std::numbers::pi);
        CHECK(x >= -std::numbers::pi);
        sum += x;
    }
    CHECK(std::abs(sum / 20000) < 0.05);
}

TEST_CASE("von mises cdf against the Bessel series oracle")
{
    for (double kappa : {0.5, 2.0, 6.0, 20.0}) {
        VonMisesCdf dist(kappa);
        CHECK(dist.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
        for (double x : {-2.5, -1.0, -0.2, 0.3, 1.4, 3.0}) {
            const double want = test_oracle::vm_series_cdf(x, kappa);
            CHECK(dist.cdf(x) == doctest::Approx(want).epsilon(1e-10));
        }
        for (double p : {0.05, 0.25, 0.5, 0.75, 0.9}) {
            const double want = test_oracle::vm_series_quantile(p, kappa);
            CHECK(std::abs(dist.quantile(p) - want) < 1e-8);
        }
    }
}

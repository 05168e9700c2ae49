// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/vonmises.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace tubechan {

namespace {

double adaptive_simpson_impl(const std::function<double(double)> &f, double a, double b, double fa,
                             double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    // Never push the per-interval tolerance below floating-point noise, or
    // sharply peaked densities make the recursion tree explode.
    const double next_tol = std::max(0.5 * tol, 1e-17);
    return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, next_tol, depth - 1) +
           adaptive_simpson_impl(f, m, b, fm, frm, fb, right, next_tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)> &f, double a, double b, double tol)
{
    if (a == b)
        return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

VonMisesCdf::VonMisesCdf(double kappa) : kappa_(kappa)
{
    if (kappa <= 0.0)
        throw std::invalid_argument("VonMisesCdf: kappa must be positive");
    const auto f = [this](double x) { return density_raw(x); };
    normalizer_ = adaptive_simpson(f, -std::numbers::pi, std::numbers::pi, 1e-14);
}

double VonMisesCdf::density_raw(double x) const { return std::exp(kappa_ * (std::cos(x) - 1.0)); }

double VonMisesCdf::cdf(double x) const
{
    if (x <= -std::numbers::pi)
        return 0.0;
    if (x >= std::numbers::pi)
        return 1.0;
    const auto f = [this](double t) { return density_raw(t); };
    // Integrate from the nearer endpoint; the density is symmetric about 0.
    if (x <= 0.0)
        return adaptive_simpson(f, -std::numbers::pi, x, 1e-15) / normalizer_;
    return 1.0 - adaptive_simpson(f, x, std::numbers::pi, 1e-15) / normalizer_;
}

double VonMisesCdf::quantile(double p) const
{
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("VonMisesCdf::quantile: p outside [0,1]");
    if (p == 0.0)
        return -std::numbers::pi;
    if (p == 1.0)
        return std::numbers::pi;
    if (p == 0.5)
        return 0.0;

    double lo = -std::numbers::pi;
    double hi = std::numbers::pi;
    for (int i = 0; i < 64 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace tubechan

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tubechan {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void KahanSum::add(double value)
{
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
        compensation_ += (sum_ - t) + value;
    else
        compensation_ += (value - t) + sum_;
    sum_ = t;
}

void KahanSum::merge(const KahanSum &other)
{
    add(other.sum_);
    compensation_ += other.compensation_;
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Base (0,0) element positions without building full arrays.
Vec3 tx_element0(const ModelState &state)
{
    const double off = -0.5 * static_cast<double>(state.arrays.tx_count - 1) *
                       state.arrays.spacing;
    return state.tx_center() + Vec3{off, 0.0, 0.0};
}

Vec3 rx_element0(const ModelState &state, double t)
{
    const double off = -0.5 * static_cast<double>(state.arrays.rx_count - 1) *
                       state.arrays.spacing;
    return state.rx_center_at(t) + Vec3{off, 0.0, 0.0};
}

// LoS transfer value for the virtual pair offset by (dp, dq), at time t and
// frequency f. One complex exponential: all phase terms are summed first.
std::complex<double> los_transfer(const ModelState &state, double dp, double dq, double t,
                                  double f)
{
    const Vec3 tx_el = tx_element0(state) + Vec3{dp, 0.0, 0.0};
    const Vec3 rx_el = rx_element0(state, t) + Vec3{dq, 0.0, 0.0};
    const Vec3 d = los_vector(tx_el, rx_el);
    const double distance = norm(d);
    const double doppler = los_doppler(d, state.motion.velocity, state.wavelength);
    const double amplitude =
        std::sqrt(state.rician.k_linear / (state.rician.k_linear + 1.0));
    const double phase = -kTwoPi * distance / state.wavelength + kTwoPi * doppler * t -
                         kTwoPi * (distance / kSpeedOfLight) * f;
    return std::polar(amplitude, phase);
}

// Per-ray transfer values with stored initial phases included; the phases
// cancel inside closed-form conjugate products.
void ray_transfers(const ModelState &state, double dp, double dq, double t, double f,
                   std::vector<std::complex<double>> &out)
{
    out.clear();
    const Vec3 tx_el = tx_element0(state) + Vec3{dp, 0.0, 0.0};
    const Vec3 rx_el = rx_element0(state, t) + Vec3{dq, 0.0, 0.0};
    const Vec3 rx_center = state.rx_center_at(t);
    const Vec3 tx_center = state.tx_center();
    const double inv_lambda = 1.0 / state.wavelength;
    const double nlos_scale = 1.0 / (state.rician.k_linear + 1.0);
    const Vec3 v = state.motion.velocity;

    for (const Cluster &cluster : state.clusters) {
        const double cluster_delay =
            update_cluster_delay(norm(cluster.wall_rx - rx_center),
                                 norm(cluster.wall_tx - tx_center), cluster.virtual_delay);
        const double virtual_distance = cluster.virtual_distance;
        for (const Ray &ray : cluster.rays) {
            const Vec3 d_tx = ray.wall_tx - tx_el;
            const Vec3 d_rx = ray.wall_rx - rx_el;
            const double rx_norm = norm(d_rx);
            const double total_distance = norm(d_tx) + rx_norm + virtual_distance;
            const double doppler = dot(d_rx, v) / rx_norm * inv_lambda;
            const double tap_delay = cluster_delay + ray.delay_offset;
            const double phase = ray.phase - kTwoPi * total_distance * inv_lambda +
                                 kTwoPi * doppler * t - kTwoPi * tap_delay * f;
            out.push_back(std::polar(std::sqrt(ray.power * nlos_scale), phase));
        }
    }
}

std::complex<double> closed_form_product(const ModelState &state,
                                         const std::vector<std::complex<double>> &anchor_rays,
                                         std::complex<double> anchor_los,
                                         const CorrelationQuery &query)
{
    const double t2 = state.motion.time + query.delta_t;
    const double f2 = query.anchor_f + query.delta_f;

    std::complex<double> r =
        anchor_los * std::conj(los_transfer(state, query.delta_p, query.delta_q, t2, f2));

    static thread_local std::vector<std::complex<double>> lagged;
    ray_transfers(state, query.delta_p, query.delta_q, t2, f2, lagged);
    for (std::size_t i = 0; i < anchor_rays.size(); ++i)
        r += anchor_rays[i] * std::conj(lagged[i]);
    return r;
}

// Anchor-side transfers shared by all grid points of one curve.
struct AnchorSide {
    std::complex<double> los;
    std::vector<std::complex<double>> rays;
    double zero_power; // value of the zero-lag query, real by construction

    AnchorSide(const ModelState &state, double anchor_f)
        : los(los_transfer(state, 0.0, 0.0, state.motion.time, anchor_f))
    {
        ray_transfers(state, 0.0, 0.0, state.motion.time, anchor_f, rays);
        double p = std::norm(los);
        for (const auto &v : rays)
            p += std::norm(v);
        zero_power = p;
    }
};

} // namespace

std::complex<double> channel_transfer(const ModelState &state, double dp, double dq, double f)
{
    static thread_local std::vector<std::complex<double>> rays;
    std::complex<double> h = los_transfer(state, dp, dq, state.motion.time, f);
    ray_transfers(state, dp, dq, state.motion.time, f, rays);
    for (const auto &v : rays)
        h += v;
    return h;
}

std::complex<double> closed_form_stfcf(const ModelState &state, const CorrelationQuery &query)
{
    const AnchorSide anchor(state, query.anchor_f);
    if (anchor.zero_power <= 0.0)
        throw std::runtime_error("closed_form_stfcf: zero-power state");
    return closed_form_product(state, anchor.rays, anchor.los, query) / anchor.zero_power;
}

std::vector<std::complex<double>> closed_form_acf(const ModelState &state, double anchor_f,
                                                  const std::vector<double> &dt_grid)
{
    const AnchorSide anchor(state, anchor_f);
    std::vector<std::complex<double>> out;
    out.reserve(dt_grid.size());
    for (double dt : dt_grid) {
        CorrelationQuery q;
        q.delta_t = dt;
        q.anchor_t = state.motion.time;
        q.anchor_f = anchor_f;
        out.push_back(closed_form_product(state, anchor.rays, anchor.los, q) /
                      anchor.zero_power);
    }
    return out;
}

std::vector<std::complex<double>> closed_form_spatial_ccf(const ModelState &state, double anchor_f,
                                                          const std::vector<double> &dq_grid)
{
    const AnchorSide anchor(state, anchor_f);
    std::vector<std::complex<double>> out;
    out.reserve(dq_grid.size());
    for (double dq : dq_grid) {
        CorrelationQuery q;
        q.delta_q = dq;
        q.anchor_t = state.motion.time;
        q.anchor_f = anchor_f;
        out.push_back(closed_form_product(state, anchor.rays, anchor.los, q) /
                      anchor.zero_power);
    }
    return out;
}

std::vector<std::complex<double>> closed_form_fcf(const ModelState &state, double anchor_f,
                                                  const std::vector<double> &df_grid)
{
    const AnchorSide anchor(state, anchor_f);
    std::vector<std::complex<double>> out;
    out.reserve(df_grid.size());
    for (double df : df_grid) {
        CorrelationQuery q;
        q.delta_f = df;
        q.anchor_t = state.motion.time;
        q.anchor_f = anchor_f;
        out.push_back(closed_form_product(state, anchor.rays, anchor.los, q) /
                      anchor.zero_power);
    }
    return out;
}

void PdpMatrix::append_row(double time, std::vector<double> row)
{
    times.push_back(time);
    power.push_back(std::move(row));
}

std::vector<double> pdp(const ChannelSnapshot &snapshot, std::size_t p, std::size_t q,
                        double bin_width)
{
    if (bin_width <= 0.0)
        throw std::invalid_argument("pdp: bin width must be positive");
    std::vector<double> bins;
    for (const PathComponent &tap : snapshot.at(p, q)) {
        const auto k = static_cast<std::size_t>(tap.delay / bin_width);
        if (bins.size() <= k)
            bins.resize(k + 1, 0.0);
        bins[k] += std::norm(tap.amplitude);
    }
    return bins;
}

double pdp_acf(const PdpMatrix &matrix, std::size_t i, std::size_t j)
{
    if (i >= matrix.power.size() || j >= matrix.power.size())
        throw std::out_of_range("pdp_acf: row index outside the matrix");
    const auto &a = matrix.power[i];
    const auto &b = matrix.power[j];
    const std::size_t n = std::min(a.size(), b.size());
    double cross = 0.0;
    double ea = 0.0;
    double eb = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        cross += a[k] * b[k];
    for (double v : a)
        ea += v * v;
    for (double v : b)
        eb += v * v;
    const double denom = std::max(ea, eb);
    if (denom <= 0.0)
        return 0.0;
    return cross / denom;
}

StationaryInterval stationary_interval(const PdpMatrix &matrix, std::size_t anchor_index,
                                       double threshold)
{
    if (anchor_index >= matrix.times.size())
        throw std::out_of_range("stationary_interval: anchor outside the matrix");
    if (threshold <= 0.0 || threshold > 1.0)
        throw std::invalid_argument("stationary_interval: threshold must be in (0, 1]");
    const double t0 = matrix.times[anchor_index];
    for (std::size_t j = anchor_index + 1; j < matrix.times.size(); ++j) {
        if (pdp_acf(matrix, anchor_index, j) <= threshold)
            return {matrix.times[j] - t0, false};
    }
    return {matrix.times.back() - t0, true};
}

ClusterCountSeries cluster_count_series(const std::vector<RunLog> &logs)
{
    if (logs.empty())
        throw std::invalid_argument("cluster_count_series: no run logs");
    const std::size_t steps = logs.front().steps.size();
    for (const RunLog &log : logs)
        if (log.steps.size() != steps)
            throw std::invalid_argument("cluster_count_series: mismatched step grids");

    ClusterCountSeries series;
    series.time.reserve(steps);
    series.distance.reserve(steps);
    series.mean_count.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        KahanSum sum;
        for (const RunLog &log : logs)
            sum.add(static_cast<double>(log.steps[i].cluster_count));
        series.time.push_back(logs.front().steps[i].time);
        series.distance.push_back(logs.front().steps[i].distance);
        series.mean_count.push_back(sum.value() / static_cast<double>(logs.size()));
    }
    return series;
}

CcdfSeries empirical_ccdf(std::vector<double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_ccdf: no samples");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    CcdfSeries series;
    series.values = samples;
    series.ccdf.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        // Strictly-greater count: skip duplicates of the current value.
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i])
            ++j;
        series.ccdf[i] = static_cast<double>(samples.size() - j) / n;
    }
    return series;
}

} // namespace tubechan

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace tubechan {

namespace {

std::vector<double> linear_grid(double step, double span)
{
    const auto count = static_cast<std::size_t>(std::floor(span / step + 0.5));
    std::vector<double> grid;
    grid.reserve(count + 1);
    for (std::size_t i = 0; i <= count; ++i)
        grid.push_back(static_cast<double>(i) * step);
    return grid;
}

std::vector<double> linspace(double lo, double hi, std::size_t points)
{
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo + static_cast<double>(i) * step;
    return grid;
}

} // namespace

Realization::Realization(const ScenarioConfig &config, std::uint64_t realization_index)
    : params_(config.evolution()), rng_(config.seed, realization_index)
{
    state_.scene = config.scene();
    state_.scene.validate();
    state_.arrays = config.arrays();
    state_.motion = config.motion_at(0.0);
    state_.rician = config.rician();
    state_.wavelength = config.wavelength();
    params_.validate();
    log_.detail = config.log_detail;
    state_.clusters =
        cold_start(state_.scene, state_.motion, params_, state_.wavelength, rng_, next_id_);
    log_step();
}

void Realization::advance(double dt)
{
    state_.motion.time += dt;
    state_.clusters = evolve_step(std::move(state_.clusters), dt, state_.scene, state_.motion,
                                  params_, state_.wavelength, rng_, next_id_);
    log_step();
}

void Realization::log_step()
{
    log_.steps.push_back({time(), distance(), state_.clusters.size()});
    if (log_.detail) {
        std::vector<ClusterDetail> details;
        details.reserve(state_.clusters.size());
        for (const Cluster &c : state_.clusters) {
            double power = 0.0;
            for (const Ray &r : c.rays)
                power += r.power;
            details.push_back({c.id, c.delay, power});
        }
        log_.cluster_details.push_back(std::move(details));
    }
}

ChannelSnapshot Realization::capture_snapshot()
{
    ChannelSnapshot snap = assemble_cir(state_);
    log_.snapshot_digests.push_back(snapshot_digest(snap));
    return snap;
}

std::vector<double> Realization::pdp_row(double bin_width) const
{
    std::vector<double> bins;
    const auto deposit = [&](double delay, double power) {
        const auto k = static_cast<std::size_t>(delay / bin_width);
        if (bins.size() <= k)
            bins.resize(k + 1, 0.0);
        bins[k] += power;
    };
    const Vec3 tx_el = state_.tx_array().element_positions[0];
    const Vec3 rx_el = state_.rx_array().element_positions[0];
    deposit(los_delay(los_vector(tx_el, rx_el)), state_.rician.los_fraction());
    const double nlos_scale = state_.rician.nlos_fraction();
    for (const Cluster &cluster : state_.clusters)
        for (const Ray &ray : cluster.rays)
            deposit(cluster.delay + ray.delay_offset, ray.power * nlos_scale);
    return bins;
}

namespace {

// Per-worker accumulation; workers own contiguous realization blocks and
// are merged in block order, so results are independent of scheduling.
struct StatsAccumulator {
    std::vector<KahanSum> acf_re, acf_im;
    std::vector<KahanSum> acf_cf_re, acf_cf_im;
    std::vector<KahanSum> ccf_re, ccf_im;
    std::vector<KahanSum> ccf_cf_re, ccf_cf_im;
    std::vector<KahanSum> fcf_re, fcf_im;
    std::vector<KahanSum> fcf_cf_re, fcf_cf_im;
    KahanSum h0_power;
    std::vector<std::vector<KahanSum>> pdp_bins; // per dt row
    std::vector<KahanSum> count_sums;            // per dt row

    void init(std::size_t n_dt, std::size_t n_dq, std::size_t n_df)
    {
        acf_re.resize(n_dt);
        acf_im.resize(n_dt);
        acf_cf_re.resize(n_dt);
        acf_cf_im.resize(n_dt);
        ccf_re.resize(n_dq);
        ccf_im.resize(n_dq);
        ccf_cf_re.resize(n_dq);
        ccf_cf_im.resize(n_dq);
        fcf_re.resize(n_df);
        fcf_im.resize(n_df);
        fcf_cf_re.resize(n_df);
        fcf_cf_im.resize(n_df);
        pdp_bins.resize(n_dt);
        count_sums.resize(n_dt);
    }

    void merge(const StatsAccumulator &o)
    {
        const auto merge_vec = [](std::vector<KahanSum> &a, const std::vector<KahanSum> &b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i].merge(b[i]);
        };
        merge_vec(acf_re, o.acf_re);
        merge_vec(acf_im, o.acf_im);
        merge_vec(acf_cf_re, o.acf_cf_re);
        merge_vec(acf_cf_im, o.acf_cf_im);
        merge_vec(ccf_re, o.ccf_re);
        merge_vec(ccf_im, o.ccf_im);
        merge_vec(ccf_cf_re, o.ccf_cf_re);
        merge_vec(ccf_cf_im, o.ccf_cf_im);
        merge_vec(fcf_re, o.fcf_re);
        merge_vec(fcf_im, o.fcf_im);
        merge_vec(fcf_cf_re, o.fcf_cf_re);
        merge_vec(fcf_cf_im, o.fcf_cf_im);
        h0_power.merge(o.h0_power);
        merge_vec(count_sums, o.count_sums);
        for (std::size_t i = 0; i < pdp_bins.size(); ++i) {
            if (pdp_bins[i].size() < o.pdp_bins[i].size())
                pdp_bins[i].resize(o.pdp_bins[i].size());
            for (std::size_t k = 0; k < o.pdp_bins[i].size(); ++k)
                pdp_bins[i][k].merge(o.pdp_bins[i][k]);
        }
    }
};

void accumulate_complex(std::vector<KahanSum> &re, std::vector<KahanSum> &im, std::size_t i,
                        std::complex<double> v)
{
    re[i].add(v.real());
    im[i].add(v.imag());
}

} // namespace

EnsembleResult run_stats_ensemble(const ScenarioConfig &config, const StatsRequest &request,
                                  std::size_t jobs)
{
    const double lambda = config.wavelength();
    EnsembleResult result;
    result.anchor_t = config.stats.anchor_ms * 1e-3;
    result.anchor_f = config.stats.anchor_f_mhz * 1e6;
    result.dt_grid = linear_grid(config.stats.dt_step_us * 1e-6, config.stats.dt_span_ms * 1e-3);
    result.dq_grid = linear_grid(config.stats.delta_step_wavelengths * lambda,
                                 config.stats.delta_max_wavelengths * lambda);
    result.df_grid = linspace(0.0, config.stats.freq_span_mhz * 1e6, config.stats.freq_points);

    const double dt_step = config.stats.dt_step_us * 1e-6;
    const double bin_width = config.stats.delay_bin_ns * 1e-9;
    const std::size_t n_dt = result.dt_grid.size();
    const auto warm_steps =
        static_cast<std::size_t>(std::floor(result.anchor_t / dt_step + 0.5));

    const std::size_t n = config.realizations;
    result.si.resize(n);

    const std::size_t worker_count = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<StatsAccumulator> partials(worker_count);

    const auto worker = [&](std::size_t w, std::size_t begin, std::size_t end) {
        StatsAccumulator &acc = partials[w];
        acc.init(n_dt, result.dq_grid.size(), result.df_grid.size());

        for (std::size_t r = begin; r < end; ++r) {
            Realization real(config, r);
            for (std::size_t s = 0; s < warm_steps; ++s)
                real.advance(dt_step);

            const ModelState &anchor_state = real.state();

            // Closed-form curves from the anchor state.
            if (request.acf) {
                const auto cf = closed_form_acf(anchor_state, result.anchor_f, result.dt_grid);
                for (std::size_t i = 0; i < cf.size(); ++i)
                    accumulate_complex(acc.acf_cf_re, acc.acf_cf_im, i, cf[i]);
            }
            if (request.ccf) {
                const auto cf =
                    closed_form_spatial_ccf(anchor_state, result.anchor_f, result.dq_grid);
                for (std::size_t i = 0; i < cf.size(); ++i)
                    accumulate_complex(acc.ccf_cf_re, acc.ccf_cf_im, i, cf[i]);
            }
            if (request.fcf) {
                const auto cf = closed_form_fcf(anchor_state, result.anchor_f, result.df_grid);
                for (std::size_t i = 0; i < cf.size(); ++i)
                    accumulate_complex(acc.fcf_cf_re, acc.fcf_cf_im, i, cf[i]);
            }

            // Ensemble products at the anchor.
            const std::complex<double> h0 =
                channel_transfer(anchor_state, 0.0, 0.0, result.anchor_f);
            acc.h0_power.add(std::norm(h0));
            if (request.ccf)
                for (std::size_t i = 0; i < result.dq_grid.size(); ++i) {
                    const auto h = channel_transfer(anchor_state, 0.0, result.dq_grid[i],
                                                    result.anchor_f);
                    accumulate_complex(acc.ccf_re, acc.ccf_im, i, h0 * std::conj(h));
                }
            if (request.fcf)
                for (std::size_t i = 0; i < result.df_grid.size(); ++i) {
                    const auto h = channel_transfer(anchor_state, 0.0, 0.0,
                                                    result.anchor_f + result.df_grid[i]);
                    accumulate_complex(acc.fcf_re, acc.fcf_im, i, h0 * std::conj(h));
                }

            PdpMatrix matrix;
            matrix.bin_width = bin_width;
            const auto take_row = [&](std::size_t row_index) {
                if (!request.pdp_si)
                    return;
                std::vector<double> row = real.pdp_row(bin_width);
                auto &bins = acc.pdp_bins[row_index];
                if (bins.size() < row.size())
                    bins.resize(row.size());
                for (std::size_t k = 0; k < row.size(); ++k)
                    bins[k].add(row[k]);
                matrix.append_row(real.time(), std::move(row));
            };

            // Walk the lag window; grid point k is reached after k steps.
            acc.count_sums[0].add(static_cast<double>(real.state().clusters.size()));
            take_row(0);
            if (request.acf)
                accumulate_complex(acc.acf_re, acc.acf_im, 0, h0 * std::conj(h0));
            for (std::size_t k = 1; k < n_dt; ++k) {
                real.advance(dt_step);
                acc.count_sums[k].add(static_cast<double>(real.state().clusters.size()));
                take_row(k);
                if (request.acf) {
                    const auto h = channel_transfer(real.state(), 0.0, 0.0, result.anchor_f);
                    accumulate_complex(acc.acf_re, acc.acf_im, k, h0 * std::conj(h));
                }
            }

            if (request.pdp_si)
                result.si[r] = stationary_interval(matrix, 0, config.stats.si_threshold);
        }
    };

    if (worker_count == 1) {
        worker(0, 0, n);
    } else {
        std::vector<std::thread> threads;
        const std::size_t block = (n + worker_count - 1) / worker_count;
        for (std::size_t w = 0; w < worker_count; ++w) {
            const std::size_t begin = w * block;
            const std::size_t end = std::min(n, begin + block);
            if (begin >= end)
                break;
            threads.emplace_back(worker, w, begin, end);
        }
        for (auto &t : threads)
            t.join();
    }

    StatsAccumulator total = std::move(partials[0]);
    for (std::size_t w = 1; w < partials.size(); ++w)
        total.merge(partials[w]);

    const double n_real = static_cast<double>(n);
    const auto normalize_ensemble = [&](const std::vector<KahanSum> &re,
                                        const std::vector<KahanSum> &im) {
        std::vector<std::complex<double>> out(re.size());
        const double denom = total.h0_power.value();
        for (std::size_t i = 0; i < re.size(); ++i)
            out[i] = std::complex<double>(re[i].value(), im[i].value()) / denom;
        return out;
    };
    const auto mean_closed = [&](const std::vector<KahanSum> &re,
                                 const std::vector<KahanSum> &im) {
        std::vector<std::complex<double>> out(re.size());
        for (std::size_t i = 0; i < re.size(); ++i)
            out[i] = std::complex<double>(re[i].value() / n_real, im[i].value() / n_real);
        return out;
    };

    if (request.acf) {
        result.acf_ensemble = normalize_ensemble(total.acf_re, total.acf_im);
        result.acf_closed = mean_closed(total.acf_cf_re, total.acf_cf_im);
    }
    if (request.ccf) {
        result.ccf_ensemble = normalize_ensemble(total.ccf_re, total.ccf_im);
        result.ccf_closed = mean_closed(total.ccf_cf_re, total.ccf_cf_im);
    }
    if (request.fcf) {
        result.fcf_ensemble = normalize_ensemble(total.fcf_re, total.fcf_im);
        result.fcf_closed = mean_closed(total.fcf_cf_re, total.fcf_cf_im);
    }
    if (request.pdp_si) {
        result.mean_pdp.bin_width = bin_width;
        for (std::size_t i = 0; i < n_dt; ++i) {
            std::vector<double> row(total.pdp_bins[i].size());
            for (std::size_t k = 0; k < row.size(); ++k)
                row[k] = total.pdp_bins[i][k].value() / n_real;
            result.mean_pdp.append_row(result.anchor_t + result.dt_grid[i], std::move(row));
        }
    } else {
        result.si.clear();
    }

    result.counts.time.resize(n_dt);
    result.counts.distance.resize(n_dt);
    result.counts.mean_count.resize(n_dt);
    for (std::size_t i = 0; i < n_dt; ++i) {
        result.counts.time[i] = result.anchor_t + result.dt_grid[i];
        result.counts.mean_count[i] = total.count_sums[i].value() / n_real;
    }
    // Distance follows deterministically from the motion model.
    const Vec3 tx = config.scene().tx_reference;
    for (std::size_t i = 0; i < n_dt; ++i) {
        const Vec3 rx =
            advance_rx(config.scene().rx_initial, config.velocity(), result.counts.time[i]);
        result.counts.distance[i] = norm(rx - tx);
    }
    return result;
}

RunResult run_realizations(const ScenarioConfig &config, const std::vector<double> &instants,
                           std::size_t jobs)
{
    const double step = config.step_s();
    const auto steps = static_cast<std::size_t>(std::floor(config.horizon_s() / step + 0.5));
    const std::size_t n = config.realizations;

    std::vector<double> wanted = instants;
    std::sort(wanted.begin(), wanted.end());

    RunResult result;
    const std::size_t worker_count = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<std::vector<KahanSum>> partial_counts(worker_count);

    const auto worker = [&](std::size_t w, std::size_t begin, std::size_t end) {
        auto &counts = partial_counts[w];
        counts.resize(steps + 1);
        for (std::size_t r = begin; r < end; ++r) {
            Realization real(config, r);
            std::size_t next_instant = 0;
            const auto capture = [&]() {
                if (r != 0)
                    return;
                while (next_instant < wanted.size() &&
                       real.time() + 0.5 * step >= wanted[next_instant]) {
                    result.snapshots.push_back(real.capture_snapshot());
                    result.snapshot_digests.push_back(real.log().snapshot_digests.back());
                    result.gains.push_back(composite_gain(config.gain(), real.distance(),
                                                          config.wavelength()));
                    ++next_instant;
                }
            };
            counts[0].add(static_cast<double>(real.state().clusters.size()));
            capture();
            for (std::size_t s = 1; s <= steps; ++s) {
                real.advance(step);
                counts[s].add(static_cast<double>(real.state().clusters.size()));
                capture();
            }
        }
    };

    if (worker_count == 1) {
        worker(0, 0, n);
    } else {
        std::vector<std::thread> threads;
        const std::size_t block = (n + worker_count - 1) / worker_count;
        for (std::size_t w = 0; w < worker_count; ++w) {
            const std::size_t begin = w * block;
            const std::size_t end = std::min(n, begin + block);
            if (begin >= end)
                break;
            threads.emplace_back(worker, w, begin, end);
        }
        for (auto &t : threads)
            t.join();
    }

    std::vector<KahanSum> counts = std::move(partial_counts[0]);
    for (std::size_t w = 1; w < partial_counts.size(); ++w)
        for (std::size_t i = 0; i <= steps; ++i)
            counts[i].merge(partial_counts[w][i]);

    const Vec3 tx = config.scene().tx_reference;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * step;
        result.counts.time.push_back(t);
        result.counts.distance.push_back(
            norm(advance_rx(config.scene().rx_initial, config.velocity(), t) - tx));
        result.counts.mean_count.push_back(counts[i].value() / static_cast<double>(n));
    }
    return result;
}

std::complex<double> ensemble_stfcf(const ScenarioConfig &config, const CorrelationQuery &query)
{
    if (config.realizations < 2)
        throw std::invalid_argument("ensemble_stfcf: at least two realizations required");
    if (query.delta_t < 0.0)
        throw std::invalid_argument("ensemble_stfcf: negative time lag");

    // Walk each realization to the anchor, take the base transfer value,
    // evolve by the lag, take the shifted one.
    const double step = config.stats.dt_step_us * 1e-6;
    const auto warm_steps = static_cast<std::size_t>(std::floor(query.anchor_t / step + 0.5));
    const auto lag_steps = static_cast<std::size_t>(std::ceil(query.delta_t / step - 1e-9));

    KahanSum prod_re;
    KahanSum prod_im;
    KahanSum power;
    for (std::uint64_t r = 0; r < config.realizations; ++r) {
        Realization real(config, r);
        for (std::size_t s = 0; s < warm_steps; ++s)
            real.advance(step);
        const std::complex<double> h0 =
            channel_transfer(real.state(), 0.0, 0.0, query.anchor_f);
        if (lag_steps > 0) {
            for (std::size_t s = 0; s + 1 < lag_steps; ++s)
                real.advance(step);
            real.advance(query.delta_t - static_cast<double>(lag_steps - 1) * step);
        }
        const std::complex<double> h1 = channel_transfer(
            real.state(), query.delta_p, query.delta_q, query.anchor_f + query.delta_f);
        const std::complex<double> product = h0 * std::conj(h1);
        prod_re.add(product.real());
        prod_im.add(product.imag());
        power.add(std::norm(h0));
    }
    return std::complex<double>(prod_re.value(), prod_im.value()) / power.value();
}

} // namespace tubechan

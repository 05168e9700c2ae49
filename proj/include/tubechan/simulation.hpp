// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tubechan/cir.hpp"
#include "tubechan/runlog.hpp"
#include "tubechan/scenario.hpp"
#include "tubechan/stats.hpp"

namespace tubechan {

// One evolving channel realization. Evolution is strictly sequential in
// time; distinct realizations with distinct stream indices are independent
// and may run on different threads.
class Realization {
  public:
    Realization(const ScenarioConfig &config, std::uint64_t realization_index);

    // Advances the receiver and the cluster set by dt and appends a log step.
    void advance(double dt);

    const ModelState &state() const { return state_; }
    double time() const { return state_.motion.time; }
    double distance() const { return norm(state_.rx_center() - state_.tx_center()); }
    const RunLog &log() const { return log_; }

    ChannelSnapshot snapshot() const { return assemble_cir(state_); }

    // Assembles a snapshot and records its digest in the run log.
    ChannelSnapshot capture_snapshot();

    // Fast power-delay-profile row of the (0,0) pair; identical to binning
    // the assembled snapshot but skips the complex coefficients.
    std::vector<double> pdp_row(double bin_width) const;

  private:
    void log_step();

    ModelState state_;
    EvolutionParams params_;
    RngStream rng_;
    std::uint64_t next_id_ = 0;
    RunLog log_;
};

// Which statistics an ensemble pass should produce.
struct StatsRequest {
    bool acf = true;
    bool ccf = true;
    bool fcf = true;
    bool pdp_si = true;
};

// Ensemble and closed-form statistics over config.realizations independent
// realizations. "closed" curves average the per-state closed form at the
// anchor; "ensemble" curves average conjugate transfer products with full
// cluster evolution across the lag window.
struct EnsembleResult {
    double anchor_t = 0.0;
    double anchor_f = 0.0;
    std::vector<double> dt_grid;               // s
    std::vector<double> dq_grid;               // m
    std::vector<double> df_grid;               // Hz
    std::vector<std::complex<double>> acf_ensemble;
    std::vector<std::complex<double>> acf_closed;
    std::vector<std::complex<double>> ccf_ensemble;
    std::vector<std::complex<double>> ccf_closed;
    std::vector<std::complex<double>> fcf_ensemble;
    std::vector<std::complex<double>> fcf_closed;
    PdpMatrix mean_pdp;                        // ensemble-mean rows over the lag window
    std::vector<StationaryInterval> si;        // one sample per realization
    ClusterCountSeries counts;                 // over the lag window
};

EnsembleResult run_stats_ensemble(const ScenarioConfig &config, const StatsRequest &request,
                                  std::size_t jobs = 1);

// Cluster-count pass over the run horizon (run.step_us steps); optionally
// captures snapshots of realization 0 at the requested instants.
struct RunResult {
    ClusterCountSeries counts;
    std::vector<ChannelSnapshot> snapshots;      // realization 0, one per instant
    std::vector<LargeScaleGain> gains;           // matching the snapshots
    std::vector<std::uint64_t> snapshot_digests; // stable across same-seed replays
};

/// Ensemble space-time-frequency correlation at a single query point,
/// averaged over `config.realizations` independent realizations and
/// normalized by the zero-lag query. Needs at least two realizations.
std::complex<double> ensemble_stfcf(const ScenarioConfig &config, const CorrelationQuery &query);

RunResult run_realizations(const ScenarioConfig &config, const std::vector<double> &instants,
                           std::size_t jobs = 1);

} // namespace tubechan

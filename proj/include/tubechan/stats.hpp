// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "tubechan/cir.hpp"
#include "tubechan/runlog.hpp"

namespace tubechan {

// Compensated (Neumaier) accumulator; parallel partials merged in a fixed
// order agree with a serial reduction to ~1e-12 relative.
class KahanSum {
  public:
    void add(double value);
    void merge(const KahanSum &other);
    double value() const { return sum_ + compensation_; }

  private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double pairwise_sum(std::span<const double> values);

// STFCF query: spatial separations along the array axis, frequency lag,
// time lag, and the anchor point. Zeroing delta_f and the separations gives
// the ACF; zeroing delta_t and delta_f the spatial CCF; zeroing delta_t and
// the separations the FCF.
struct CorrelationQuery {
    double delta_p = 0.0; // m, Tx-side virtual element offset
    double delta_q = 0.0; // m, Rx-side virtual element offset
    double delta_f = 0.0; // Hz
    double delta_t = 0.0; // s
    double anchor_t = 0.0;
    double anchor_f = 0.0;
};

// Transfer-function value H(t, f) at the state's own time for the virtual
// element pair obtained by shifting the base (0,0) pair by (dp, dq) along
// the array axis. Shared between the ensemble estimator and the closed form.
std::complex<double> channel_transfer(const ModelState &state, double dp, double dq, double f);

/// Closed-form STFCF of the given state (deterministic extrapolation over
/// delta_t: powers and virtual delays frozen, geometry advanced). The LoS
/// and scattered parts are summed as uncorrelated; the result is normalized
/// by the zero-lag query so R(0) = 1.
std::complex<double> closed_form_stfcf(const ModelState &state, const CorrelationQuery &query);

// Grid reductions of the closed-form STFCF.
std::vector<std::complex<double>> closed_form_acf(const ModelState &state, double anchor_f,
                                                  const std::vector<double> &dt_grid);
std::vector<std::complex<double>> closed_form_spatial_ccf(const ModelState &state, double anchor_f,
                                                          const std::vector<double> &dq_grid);
std::vector<std::complex<double>> closed_form_fcf(const ModelState &state, double anchor_f,
                                                  const std::vector<double> &df_grid);

// Power delay profile matrix: one row per sampled time, shared uniform
// delay binning (bin k covers [k*w, (k+1)*w)).
struct PdpMatrix {
    double bin_width = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> power; // ragged rows, missing bins are 0

    void append_row(double time, std::vector<double> row);
};

// Bins |amplitude|^2 of one antenna pair by delay; conserves total power.
std::vector<double> pdp(const ChannelSnapshot &snapshot, std::size_t p, std::size_t q,
                        double bin_width);

// Normalized PDP correlation between the rows at times[i] and times[j]:
// sum(L1*L2) / max(sum(L1^2), sum(L2^2)). 1 at zero lag, 0 for disjoint
// supports.
double pdp_acf(const PdpMatrix &matrix, std::size_t i, std::size_t j);

struct StationaryInterval {
    double interval = 0.0; // s
    bool censored = false; // true when the threshold was never crossed
};

// Smallest grid lag at which the PDP autocorrelation from times[anchor]
// drops to or below the threshold; censored at the remaining window length.
StationaryInterval stationary_interval(const PdpMatrix &matrix, std::size_t anchor_index,
                                       double threshold);

// Per-step cluster counts against distance, averaged over realizations.
// All logs must share the same step grid.
struct ClusterCountSeries {
    std::vector<double> time;
    std::vector<double> distance;
    std::vector<double> mean_count;
};

ClusterCountSeries cluster_count_series(const std::vector<RunLog> &logs);

// Empirical complementary CDF: ccdf[i] is the fraction of samples strictly
// greater than values[i], evaluated at the sorted sample points.
struct CcdfSeries {
    std::vector<double> values;
    std::vector<double> ccdf;
};

CcdfSeries empirical_ccdf(std::vector<double> samples);

} // namespace tubechan

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <cstdint>
#include <vector>

namespace tubechan {

// Per-step summary of one realization.
struct StepRecord {
    double time = 0.0;     // s
    double distance = 0.0; // Tx-Rx center distance, m
    std::size_t cluster_count = 0;
};

// Optional per-cluster detail, recorded when detail logging is on.
struct ClusterDetail {
    std::uint64_t id = 0;
    double delay = 0.0;
    double power_sum = 0.0;
};

// Append-only log of one realization. Timestamps are strictly increasing;
// digests are stable across replays with the same seed.
struct RunLog {
    bool detail = false;
    std::vector<StepRecord> steps;
    std::vector<std::vector<ClusterDetail>> cluster_details; // per step when detail is on
    std::vector<std::uint64_t> snapshot_digests;
};

} // namespace tubechan

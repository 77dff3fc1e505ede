// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/config.hpp"
#include "nrps/metrics.hpp"
#include "nrps/rrc_drx_energy.hpp"
#include "nrps/traffic.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nrps
{

/// Invariant and protocol counters collected while a replication runs.
struct CellCounters
{
    std::uint64_t grants = 0;
    std::uint64_t grants_during_skip = 0;
    std::uint64_t grants_while_unreachable = 0;
    std::uint64_t harq_retransmissions = 0;
    std::uint64_t harq_losses = 0;
    std::uint64_t paging_episodes = 0;
    std::uint64_t paged_episodes = 0;
    std::uint64_t paged_skips = 0; // paged UE that skipped its PO; must stay 0
    std::uint64_t po_skips = 0;
    std::uint64_t false_alarms = 0;
    std::uint64_t cg_attempts = 0;
    std::uint64_t cg_collisions = 0;
    std::uint64_t rach_attempts = 0;
    std::uint64_t rach_collisions = 0;
    std::uint64_t sdt_fallbacks = 0;
    std::uint64_t rrc_resumes = 0;
    std::uint64_t rrc_setups = 0;
    std::uint64_t sdt_rrc_charges = 0; // RRC connects charged to a pure SDT delivery; must stay 0
};

/// One paging-cycle episode of one UE.
struct EpisodeSummary
{
    std::uint32_t ue_id = 0;
    SimTime po;
    bool paged = false;
    bool monitored_po = false;
    double wake_up_ms = 0.0;
};

struct ReplicationResult
{
    std::uint32_t replication_id = 0;
    std::uint64_t seed = 0;
    std::uint32_t cell = 0;
    SimTime horizon;
    SampleSeries samples;
    std::vector<Packet> packets;
    std::vector<std::uint64_t> queued_ids;
    std::vector<SinrProfile> profiles;
    std::vector<std::vector<TraceSegment>> traces; // per local UE
    std::vector<EnergyLedger> ledgers;             // per local UE
    std::vector<EpisodeSummary> episodes;
    CellCounters counters;
    std::uint64_t trace_hash = 0;
    std::uint64_t events = 0;

    AuditResult audit() const { return conservation_audit(packets, queued_ids, horizon); }
};

/// Per-UE stream so one UE's draws never shift another's.
inline RngStream ue_stream(std::uint64_t seed, Stream stream, std::uint32_t ue)
{
    return RngStream(seed, (static_cast<std::uint64_t>(stream) << 32) + 1 + ue);
}

using Interval64 = std::pair<SimTime, SimTime>;

/// Sorts and merges overlapping or touching intervals.
inline std::vector<Interval64> merge_intervals(std::vector<Interval64> v)
{
    std::sort(v.begin(), v.end());
    std::vector<Interval64> out;
    for (const auto& iv : v)
    {
        if (iv.second <= iv.first)
        {
            continue;
        }
        if (!out.empty() && iv.first <= out.back().second)
        {
            out.back().second = std::max(out.back().second, iv.second);
        }
        else
        {
            out.push_back(iv);
        }
    }
    return out;
}

/// a minus b, both merged.
inline std::vector<Interval64> subtract_intervals(const std::vector<Interval64>& a, const std::vector<Interval64>& b)
{
    std::vector<Interval64> out;
    std::size_t j = 0;
    for (auto [s, e] : a)
    {
        while (j < b.size() && b[j].second <= s)
        {
            ++j;
        }
        SimTime cur = s;
        for (std::size_t k = j; k < b.size() && b[k].first < e; ++k)
        {
            if (b[k].first > cur)
            {
                out.emplace_back(cur, b[k].first);
            }
            cur = std::max(cur, b[k].second);
        }
        if (cur < e)
        {
            out.emplace_back(cur, e);
        }
    }
    return out;
}

} // namespace nrps

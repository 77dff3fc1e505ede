// SPDX-License-Identifier: Apache-2.0
#pragma once

// Idle/Inactive reachability: SSB pre-synchronisation, early paging indication,
// paging-occasion decoding and wake-up (receiver-on) time accounting.

#include "nrps/errors.hpp"
#include "nrps/link.hpp"
#include "nrps/rrc_drx_energy.hpp"
#include "nrps/sim_core.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace nrps
{

enum class EpiMode : std::uint8_t
{
    None,
    Common,
    Grouped,
};

struct PagingConfig
{
    double po_period_ms = 320.0;
    EpiMode epi_mode = EpiMode::None;
    std::int32_t num_groups = 8;
    double epi_lead_ms = 19.5;
    bool idle_rs = false;
    double ssb_period_ms = 20.0;
    double po_decode_ms = 2.0;
    double epi_decode_ms = 0.5;
    double ssb_active_ms = 2.0;
    double rs_sync_ms = 1.0;
    double low_sinr_wake_ahead_ms = 80.0;
    std::int32_t low_sinr_num_ssbs = 3;
    double page_rate_per_s = 0.2; // per UE

    void validate() const
    {
        require(po_period_ms > 0.0, "paging.po_period_ms", "must be positive");
        require(epi_decode_ms < po_decode_ms, "paging.epi_decode_ms", "EPI decoding must be shorter than PO decoding");
        require(ssb_period_ms > ssb_active_ms && ssb_active_ms > 0.0, "paging.ssb_active_ms",
                "SSB burst must be positive and shorter than the SSB period");
        require(num_groups >= 1, "paging.num_groups", "at least one paging group");
        require(low_sinr_num_ssbs >= 1, "paging.low_sinr_num_ssbs", "at least one SSB");
        require(low_sinr_num_ssbs * ssb_period_ms <= low_sinr_wake_ahead_ms, "paging.low_sinr_num_ssbs",
                "SSB bursts must fit inside the low-SINR wake-ahead window");
        require(epi_lead_ms > epi_decode_ms, "paging.epi_lead_ms", "EPI must end before the PO");
        require(rs_sync_ms > 0.0, "paging.rs_sync_ms", "must be positive");
        require(page_rate_per_s >= 0.0, "paging.page_rate_per_s", "must be non-negative");
        require(low_sinr_wake_ahead_ms + epi_lead_ms < po_period_ms, "paging.po_period_ms",
                "pre-synchronisation must fit within one paging cycle");
    }

    std::int32_t effective_groups() const noexcept { return epi_mode == EpiMode::Grouped ? num_groups : 1; }
};

struct PresyncPlan
{
    double wake_ahead_ms = 0.0;
    std::int32_t num_ssbs = 0; // 0 when an idle RS replaces the SSBs
};

inline PresyncPlan ssb_presync_plan(const SinrProfile& profile, const PagingConfig& cfg)
{
    if (cfg.idle_rs)
    {
        const double lead = cfg.epi_mode == EpiMode::None ? 0.0 : cfg.epi_lead_ms;
        return PresyncPlan{lead + cfg.rs_sync_ms, 0};
    }
    if (profile.sinr_class == SinrClass::Low)
    {
        return PresyncPlan{cfg.low_sinr_wake_ahead_ms, cfg.low_sinr_num_ssbs};
    }
    return PresyncPlan{cfg.ssb_period_ms, 1};
}

/// ue_id -> group in [0, num_groups), uniform and fixed for the replication.
class PagingGroupAssignment
{
  public:
    PagingGroupAssignment() = default;
    PagingGroupAssignment(std::vector<std::int32_t> groups, std::int32_t num_groups)
        : groups_(std::move(groups)), num_groups_(num_groups)
    {
    }

    static PagingGroupAssignment uniform(RngStream& rng, std::size_t num_ues, std::int32_t num_groups)
    {
        std::vector<std::int32_t> g(num_ues);
        for (auto& x : g)
        {
            x = static_cast<std::int32_t>(rng.uniform_int(0, num_groups - 1));
        }
        return PagingGroupAssignment(std::move(g), num_groups);
    }

    std::int32_t group_of(std::uint32_t ue) const { return groups_.at(ue); }
    std::int32_t num_groups() const noexcept { return num_groups_; }
    std::size_t size() const noexcept { return groups_.size(); }

  private:
    std::vector<std::int32_t> groups_;
    std::int32_t num_groups_ = 1;
};

enum class PoDecision : std::uint8_t
{
    MonitorPo,
    SkipPo,
};

/// Whether a UE that monitored the EPI occasion goes on to decode the PO.
inline PoDecision epi_outcome(std::uint32_t ue, const std::set<std::uint32_t>& paged_ues,
                              const PagingGroupAssignment& assignment, EpiMode mode)
{
    switch (mode)
    {
    case EpiMode::None:
        return PoDecision::MonitorPo;
    case EpiMode::Common:
        return paged_ues.empty() ? PoDecision::SkipPo : PoDecision::MonitorPo;
    case EpiMode::Grouped: {
        const std::int32_t mine = assignment.group_of(ue);
        for (std::uint32_t p : paged_ues)
        {
            if (assignment.group_of(p) == mine)
            {
                return PoDecision::MonitorPo;
            }
        }
        return PoDecision::SkipPo;
    }
    }
    return PoDecision::MonitorPo;
}

enum class PoResult : std::uint8_t
{
    StartResume,
    BackToSleep,
};

inline PoResult process_po(std::uint32_t ue, const std::set<std::uint32_t>& paged_ues)
{
    return paged_ues.count(ue) ? PoResult::StartResume : PoResult::BackToSleep;
}

/// Receiver-on segments of one paging cycle for one UE.
struct WakeUpRecord
{
    std::uint32_t ue_id = 0;
    SimTime start = SimTime::max();
    SimTime end{};
    std::vector<TraceSegment> segments;
    std::optional<SimTime> payload_delivered;
    bool paged = false;
    bool false_alarm = false;

    void add(SimTime a, SimTime b, PowerState state = PowerState::ActiveMonitor)
    {
        if (b <= a)
        {
            return;
        }
        segments.push_back(TraceSegment{a, b, state});
        start = std::min(start, a);
        end = std::max(end, b);
    }
};

/// Cumulative receiver-on time: union of segments plus the sleep-transition overhead of
/// every internal gap (the whole gap when no sleep state fits).
inline SimTime episode_active_time(const WakeUpRecord& record, const EnergyModel& model)
{
    std::vector<std::pair<SimTime, SimTime>> spans;
    spans.reserve(record.segments.size());
    for (const auto& s : record.segments)
    {
        spans.emplace_back(s.start, s.end);
    }
    std::sort(spans.begin(), spans.end());
    SimTime total{};
    SimTime cur_start{};
    SimTime cur_end{};
    bool open = false;
    for (const auto& [a, b] : spans)
    {
        if (!open)
        {
            cur_start = a;
            cur_end = b;
            open = true;
            continue;
        }
        if (a <= cur_end)
        {
            cur_end = std::max(cur_end, b);
            continue;
        }
        total += cur_end - cur_start;
        const SimTime gap = a - cur_end;
        const PowerState sleep = model.select_sleep_state(gap);
        total += sleep == PowerState::ActiveMonitor ? gap : model.overhead(sleep);
        cur_start = a;
        cur_end = b;
    }
    if (open)
    {
        total += cur_end - cur_start;
    }
    return total;
}

inline double wake_up_time_ms(const WakeUpRecord& record, const EnergyModel& model)
{
    return to_ms(episode_active_time(record, model));
}

/// Fills the pre-PO part of a record (SSB or RS pre-sync, optional EPI) for a PO at `po`.
inline void plan_presync(WakeUpRecord& record, SimTime po, const SinrProfile& profile, const PagingConfig& cfg)
{
    const SimTime epi_at = po - ms_to_symbols_ceil(cfg.epi_lead_ms);
    const SimTime first_monitor = cfg.epi_mode == EpiMode::None ? po : epi_at;
    if (cfg.idle_rs)
    {
        record.add(first_monitor - ms_to_symbols_ceil(cfg.rs_sync_ms), first_monitor);
    }
    else
    {
        const PresyncPlan plan = ssb_presync_plan(profile, cfg);
        const SimTime period = ms_to_symbols_ceil(cfg.ssb_period_ms);
        const SimTime burst = ms_to_symbols_ceil(cfg.ssb_active_ms);
        // SSB bursts sit on the SSB grid; the UE uses the latest ones before the PO.
        for (std::int32_t k = plan.num_ssbs; k >= 1; --k)
        {
            const SimTime at = po - SimTime{period.ticks * k};
            record.add(at, at + burst);
        }
    }
    if (cfg.epi_mode != EpiMode::None)
    {
        record.add(epi_at, epi_at + ms_to_symbols_ceil(cfg.epi_decode_ms));
    }
}

} // namespace nrps

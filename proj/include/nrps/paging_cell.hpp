// SPDX-License-Identifier: Apache-2.0
#pragma once

// Idle/Inactive paging cell: per-PO episodes with SSB or RS pre-sync, optional
// early paging indication, PO decoding, resume and page delivery.

#include "nrps/cell_result.hpp"
#include "nrps/config.hpp"
#include "nrps/link.hpp"
#include "nrps/paging.hpp"
#include "nrps/rrc_drx_energy.hpp"
#include "nrps/scheduler.hpp"
#include "nrps/sim_core.hpp"

#include <cstdint>
#include <deque>
#include <set>
#include <vector>

namespace nrps
{

class PagingCell
{
  public:
    PagingCell(const ScenarioConfig& cfg, std::uint64_t seed, std::uint32_t replication_id, std::uint32_t cell)
        : cfg_(cfg), seed_(seed), horizon_(cfg.horizon())
    {
        result_.replication_id = replication_id;
        result_.seed = seed;
        result_.cell = cell;
        result_.horizon = horizon_;
        result_.samples = SampleSeries("wakeup", "ms");
        period_ = ms_to_symbols_ceil(cfg.paging.po_period_ms);
        lead_ = ms_to_symbols_ceil(cfg.paging.epi_lead_ms);
    }

    ReplicationResult run()
    {
        const auto k = static_cast<std::uint32_t>(cfg_.ues_per_cell);
        RngStream sinr_rng(seed_, Stream::Sinr);
        RngStream group_rng(seed_, Stream::Paging);
        result_.profiles = draw_sinr_profiles(sinr_rng, k, cfg_.link);
        groups_ = PagingGroupAssignment::uniform(group_rng, k, cfg_.paging.effective_groups());
        ues_.resize(k);
        for (std::uint32_t u = 0; u < k; ++u)
        {
            ues_[u].pages = ue_stream(seed_, Stream::Paging, u);
            ues_[u].link = ue_stream(seed_, Stream::Link, u);
            ues_[u].rrc = RrcMachine(cfg_.rrc.initial_state);
            if (cfg_.rrc.initial_state == RrcState::Connected)
            {
                ues_[u].connected_from = SimTime{0};
            }
            schedule_page(u, SimTime{0});
        }
        schedule_decision(period_);
        result_.events = engine_.run_until(horizon_);
        result_.trace_hash = engine_.trace_hash();
        finish();
        return std::move(result_);
    }

  private:
    struct Ue
    {
        RngStream pages{0, 0};
        RngStream link{0, 0};
        RrcMachine rrc;
        std::deque<std::uint64_t> pending;
        SimTime busy_until{};
        EventHandle suspend_timer;
        std::optional<SimTime> connected_from;
        ActivityTimeline timeline;
    };

    void schedule_page(std::uint32_t u, SimTime from)
    {
        const auto gap = next_interarrival(ues_[u].pages, cfg_.paging.page_rate_per_s);
        if (!gap || from + *gap > horizon_)
        {
            return;
        }
        engine_.schedule(from + *gap, EventKind::PacketArrival, u, [this, u] { on_page(u); });
    }

    void on_page(std::uint32_t u)
    {
        const SimTime now = engine_.now();
        Packet p;
        p.id = result_.packets.size();
        p.ue_id = u;
        p.direction = Direction::Downlink;
        p.size_bytes = cfg_.traffic.packet_size_bytes;
        p.arrival = now;
        result_.packets.push_back(p);
        schedule_page(u, now);
        Ue& ue = ues_[u];
        if (ue.rrc.state() == RrcState::Connected)
        {
            const SimTime done = deliver(u, p.id, std::max(ue.busy_until, now), now);
            arm_suspend(u, done);
            return;
        }
        ue.pending.push_back(p.id);
    }

    void schedule_decision(SimTime po)
    {
        const SimTime at = po - lead_;
        if (po > horizon_)
        {
            return;
        }
        const EventKind kind = cfg_.paging.epi_mode == EpiMode::None ? EventKind::PagingOccasion : EventKind::EpiOccasion;
        engine_.schedule(at, kind, 0, [this, po] { on_decision(po); });
    }

    /// Decision point of the PO at `po`: the gNB fixes the paged set, every non-connected UE
    /// runs one episode.
    void on_decision(SimTime po)
    {
        std::set<std::uint32_t> paged;
        for (std::uint32_t u = 0; u < ues_.size(); ++u)
        {
            if (ues_[u].rrc.state() != RrcState::Connected && !ues_[u].pending.empty())
            {
                paged.insert(u);
            }
        }
        const SimTime po_decode = ms_to_symbols_ceil(cfg_.paging.po_decode_ms);
        for (std::uint32_t u = 0; u < ues_.size(); ++u)
        {
            Ue& ue = ues_[u];
            if (ue.rrc.state() == RrcState::Connected)
            {
                continue;
            }
            WakeUpRecord record;
            record.ue_id = u;
            record.paged = paged.count(u) > 0;
            plan_presync(record, po, result_.profiles[u], cfg_.paging);
            const PoDecision decision = epi_outcome(u, paged, groups_, cfg_.paging.epi_mode);
            bool monitored = false;
            if (decision == PoDecision::SkipPo)
            {
                ++result_.counters.po_skips;
                result_.counters.paged_skips += record.paged;
            }
            else
            {
                monitored = true;
                record.add(po, po + po_decode);
                if (process_po(u, paged) == PoResult::BackToSleep)
                {
                    record.false_alarm = true;
                    ++result_.counters.false_alarms;
                }
                else
                {
                    resume_and_deliver(u, record, po + po_decode);
                }
            }
            ++result_.counters.paging_episodes;
            result_.counters.paged_episodes += record.paged;
            for (const auto& s : record.segments)
            {
                ue.timeline.add(s.start, s.end, s.state);
            }
            const double value = wake_up_time_ms(record, cfg_.energy);
            result_.samples.add(result_.replication_id, u, value);
            result_.episodes.push_back(EpisodeSummary{u, po, record.paged, monitored, value});
        }
        schedule_decision(po + period_);
    }

    void resume_and_deliver(std::uint32_t u, WakeUpRecord& record, SimTime from)
    {
        Ue& ue = ues_[u];
        const bool from_idle = ue.rrc.state() == RrcState::Idle;
        const SimTime connected = from + ue.rrc.connect(cfg_.rrc);
        ++(from_idle ? result_.counters.rrc_setups : result_.counters.rrc_resumes);
        ue.connected_from = connected;
        record.add(from, connected);
        SimTime t = connected;
        while (!ue.pending.empty())
        {
            const std::uint64_t pid = ue.pending.front();
            ue.pending.pop_front();
            t = deliver(u, pid, t, connected);
        }
        record.add(connected, t);
        record.payload_delivered = t;
        ue.busy_until = t;
        arm_suspend(u, t);
    }

    /// PDCCH grant at the first grid point at or after `ready`, then PDSCH with HARQ.
    /// Returns the completion time; packets completing past the horizon stay queued.
    SimTime deliver(std::uint32_t u, std::uint64_t pid, SimTime ready, SimTime not_before)
    {
        Ue& ue = ues_[u];
        const auto& d = cfg_.sched.delays;
        Packet& p = result_.packets[pid];
        SimTime data = cfg_.sched.grid.next_occasion(std::max({ready, not_before, p.arrival + SimTime{d.gnb_processing_symbols}}));
        ++result_.counters.grants;
        for (std::int32_t attempt = 1;; ++attempt)
        {
            ue.timeline.add(data, data + SimTime{d.tti_symbols}, PowerState::ActiveRx);
            p.harq_attempts = attempt;
            const TxOutcome out = transmission_outcome(ue.link, result_.profiles[u], attempt, cfg_.link);
            const SimTime done = data + d.reception();
            if (out == TxOutcome::Ack || attempt >= cfg_.link.max_harq_attempts)
            {
                if (done > horizon_)
                {
                    result_.queued_ids.push_back(pid);
                }
                else if (out == TxOutcome::Ack)
                {
                    p.delivered = done;
                }
                else
                {
                    p.lost = true;
                    ++result_.counters.harq_losses;
                }
                ue.busy_until = std::max(ue.busy_until, done);
                return done;
            }
            ++result_.counters.harq_retransmissions;
            data = data + harq_retx_delay(cfg_.link);
        }
    }

    void arm_suspend(std::uint32_t u, SimTime last_activity)
    {
        Ue& ue = ues_[u];
        engine_.cancel(ue.suspend_timer);
        const SimTime at = last_activity + ms_to_symbols_ceil(cfg_.rrc.suspend_timer_ms);
        if (at > horizon_)
        {
            return;
        }
        ue.suspend_timer = engine_.schedule(at, EventKind::RrcTimerExpiry, u, [this, u] {
            Ue& x = ues_[u];
            x.rrc.transition(RrcEdge::Suspend, cfg_.rrc);
            if (cfg_.rrc.initial_state == RrcState::Idle)
            {
                x.rrc.transition(RrcEdge::Release, cfg_.rrc);
            }
            x.timeline.add(*x.connected_from, engine_.now(), PowerState::ActiveMonitor);
            x.connected_from.reset();
        });
    }

    void finish()
    {
        result_.samples.seal();
        for (std::uint32_t u = 0; u < ues_.size(); ++u)
        {
            Ue& ue = ues_[u];
            result_.queued_ids.insert(result_.queued_ids.end(), ue.pending.begin(), ue.pending.end());
            if (ue.connected_from)
            {
                ue.timeline.add(*ue.connected_from, horizon_, PowerState::ActiveMonitor);
            }
            result_.traces.push_back(ue.timeline.finalize(horizon_, cfg_.energy));
            result_.ledgers.push_back(ledger_from_trace(u, result_.traces.back(), cfg_.energy));
        }
    }

    const ScenarioConfig& cfg_;
    std::uint64_t seed_;
    SimTime horizon_;
    SimTime period_;
    SimTime lead_;
    Engine engine_;
    PagingGroupAssignment groups_;
    std::vector<Ue> ues_;
    ReplicationResult result_;
};

} // namespace nrps

// SPDX-License-Identifier: Apache-2.0
#pragma once

// Downlink connected-mode cell: Poisson arrivals, PF scheduling on a PDCCH grid,
// cross-slot offsets, PDCCH skipping, C-DRX and HARQ.

#include "nrps/cell_result.hpp"
#include "nrps/config.hpp"
#include "nrps/link.hpp"
#include "nrps/scheduler.hpp"
#include "nrps/sim_core.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace nrps
{

class DownlinkCell
{
  public:
    DownlinkCell(const ScenarioConfig& cfg, std::uint64_t seed, std::uint32_t replication_id, std::uint32_t cell)
        : cfg_(cfg), policy_(cfg.scheduling_policy()), seed_(seed), horizon_(cfg.horizon()),
          offset_rng_(seed, Stream::Offset)
    {
        result_.replication_id = replication_id;
        result_.seed = seed;
        result_.cell = cell;
        result_.horizon = horizon_;
        result_.samples = SampleSeries("latency", "ms");
    }

    ReplicationResult run()
    {
        const auto k = static_cast<std::uint32_t>(cfg_.ues_per_cell);
        RngStream sinr_rng(seed_, Stream::Sinr);
        RngStream select_rng(seed_, Stream::Selection);
        RngStream phase_rng(seed_, Stream::DrxPhase);
        result_.profiles = draw_sinr_profiles(sinr_rng, k, cfg_.link);
        skip_slots_ = skip_slots_of(policy_);

        ues_.resize(k);
        for (std::uint32_t u = 0; u < k; ++u)
        {
            Ue& ue = ues_[u];
            ue.sched.ue_id = u;
            ue.traffic = ue_stream(seed_, Stream::Traffic, u);
            ue.link = ue_stream(seed_, Stream::Link, u);
            ue.skipper = skip_slots_.has_value() && select_rng.uniform01() < cfg_.sched.skip_fraction;
            std::int64_t phase = 0;
            if (cfg_.drx.enabled)
            {
                phase = phase_rng.uniform_int(0, ms_to_symbols_ceil(cfg_.drx.cycle_ms).ticks - 1);
            }
            ue.drx = DrxTracker(cfg_.drx, phase);
        }
        for (std::uint32_t u = 0; u < k; ++u)
        {
            schedule_arrival(u, SimTime{0});
            if (ues_[u].skipper)
            {
                start_skip(u, SimTime{0});
            }
        }
        result_.events = engine_.run_until(horizon_);
        result_.trace_hash = engine_.trace_hash();
        finish();
        return std::move(result_);
    }

  private:
    struct Ue
    {
        UeSchedState sched;
        RngStream traffic{0, 0};
        RngStream link{0, 0};
        DrxTracker drx;
        bool skipper = false;
        std::int32_t in_flight = 0;
        std::vector<Interval64> skip_windows;
        std::vector<SimTime> rx_starts;
        EventHandle drx_timer;
        std::set<std::uint64_t> flying;
    };

    void schedule_arrival(std::uint32_t u, SimTime from)
    {
        const auto gap = next_interarrival(ues_[u].traffic, cfg_.traffic.per_ue_arrival_rate);
        if (!gap || from + *gap > horizon_)
        {
            return;
        }
        engine_.schedule(from + *gap, EventKind::PacketArrival, u, [this, u] { on_arrival(u); });
    }

    void on_arrival(std::uint32_t u)
    {
        const SimTime now = engine_.now();
        Packet p;
        p.id = result_.packets.size();
        p.ue_id = u;
        p.direction = Direction::Downlink;
        p.size_bytes = cfg_.traffic.packet_size_bytes;
        p.arrival = now;
        result_.packets.push_back(p);
        ues_[u].sched.dl_queue.push_back(QueuedPacket{p.id, now + SimTime{cfg_.sched.delays.gnb_processing_symbols}});
        schedule_arrival(u, now);
        request_occasion(u);
    }

    /// Earliest grid occasion at which UE u could be granted its head packet.
    void request_occasion(std::uint32_t u)
    {
        Ue& ue = ues_[u];
        if (ue.sched.dl_queue.empty())
        {
            return;
        }
        SimTime t = std::max(engine_.now(), ue.sched.dl_queue.front().eligible_at);
        if (ue.sched.skip_until && *ue.sched.skip_until > t)
        {
            t = *ue.sched.skip_until;
        }
        SimTime occ = cfg_.sched.grid.next_occasion(t);
        while (!ue.drx.reachable(occ))
        {
            occ = cfg_.sched.grid.next_occasion(ue.drx.next_reachable(occ));
        }
        if (occ > horizon_ || occasions_.count(occ.ticks))
        {
            return;
        }
        occasions_.insert(occ.ticks);
        engine_.schedule(occ, EventKind::PdcchOccasion, u, [this] { on_occasion(); });
    }

    void on_occasion()
    {
        const SimTime now = engine_.now();
        occasions_.erase(now.ticks);
        std::vector<UeSchedState> states;
        states.reserve(ues_.size());
        for (auto& ue : ues_)
        {
            states.push_back(std::move(ue.sched));
        }
        auto reachable = [this, now](std::uint32_t u) { return ues_[u].drx.reachable(now); };
        const auto grants = on_pdcch_occasion(now, policy_, cfg_.sched.grid, states, result_.profiles, offset_rng_, reachable);
        for (std::size_t i = 0; i < ues_.size(); ++i)
        {
            ues_[i].sched = std::move(states[i]);
        }
        for (const Grant& g : grants)
        {
            Ue& ue = ues_[g.ue_id];
            ++result_.counters.grants;
            if (ue.sched.skipping(now))
            {
                ++result_.counters.grants_during_skip;
            }
            if (!ue.drx.reachable(now))
            {
                ++result_.counters.grants_while_unreachable;
            }
            if (cfg_.drx.enabled)
            {
                const SimTime until = ue.drx.on_grant(now);
                engine_.cancel(ue.drx_timer);
                const std::uint32_t u = g.ue_id;
                ue.drx_timer = engine_.schedule(until, EventKind::DrxTimerExpiry, u, [this, u] { request_occasion(u); });
            }
            ++ue.in_flight;
            ue.flying.insert(g.packet_id);
            schedule_delivery(g.ue_id, g.packet_id, 1, g.data_at);
        }
        for (std::uint32_t u = 0; u < ues_.size(); ++u)
        {
            request_occasion(u);
        }
    }

    void schedule_delivery(std::uint32_t u, std::uint64_t pid, std::int32_t attempt, SimTime data_at)
    {
        ues_[u].rx_starts.push_back(data_at);
        engine_.schedule(data_at + cfg_.sched.delays.reception(), EventKind::PdschDelivery, u,
                         [this, u, pid, attempt, data_at] { on_delivery(u, pid, attempt, data_at); });
    }

    void on_delivery(std::uint32_t u, std::uint64_t pid, std::int32_t attempt, SimTime data_at)
    {
        Ue& ue = ues_[u];
        Packet& p = result_.packets[pid];
        p.harq_attempts = attempt;
        const TxOutcome out = transmission_outcome(ue.link, result_.profiles[u], attempt, cfg_.link);
        if (out == TxOutcome::Nack && attempt < cfg_.link.max_harq_attempts)
        {
            ++result_.counters.harq_retransmissions;
            const SimTime retx = std::max(engine_.now(), data_at + harq_retx_delay(cfg_.link));
            schedule_delivery(u, pid, attempt + 1, retx);
            return;
        }
        if (out == TxOutcome::Ack)
        {
            p.delivered = engine_.now();
        }
        else
        {
            p.lost = true;
            ++result_.counters.harq_losses;
        }
        --ue.in_flight;
        ue.flying.erase(pid);
        if (ue.skipper && idle(ue))
        {
            start_skip(u, engine_.now());
        }
    }

    static bool idle(const Ue& ue) { return ue.sched.dl_queue.empty() && ue.in_flight == 0; }

    void start_skip(std::uint32_t u, SimTime now)
    {
        Ue& ue = ues_[u];
        const SimTime until = apply_skipping(ue.sched, now, *skip_slots_);
        ue.skip_windows.emplace_back(now, until);
        if (until <= horizon_)
        {
            engine_.schedule(until, EventKind::SkipWindowExpiry, u, [this, u] { on_skip_expiry(u); });
        }
    }

    void on_skip_expiry(std::uint32_t u)
    {
        if (idle(ues_[u]))
        {
            start_skip(u, engine_.now());
        }
        else
        {
            request_occasion(u);
        }
    }

    void finish()
    {
        for (const Packet& p : result_.packets)
        {
            if (p.delivered)
            {
                result_.samples.add(result_.replication_id, p.ue_id, to_ms(*p.delivered - p.arrival));
            }
            else if (p.lost)
            {
                result_.samples.add(result_.replication_id, p.ue_id, kLost);
            }
        }
        result_.samples.seal();
        const SimTime tti{cfg_.sched.delays.tti_symbols};
        for (std::uint32_t u = 0; u < ues_.size(); ++u)
        {
            Ue& ue = ues_[u];
            for (const auto& q : ue.sched.dl_queue)
            {
                result_.queued_ids.push_back(q.packet_id);
            }
            result_.queued_ids.insert(result_.queued_ids.end(), ue.flying.begin(), ue.flying.end());

            std::vector<Interval64> awake;
            if (!cfg_.drx.enabled)
            {
                awake.emplace_back(SimTime{0}, horizon_);
            }
            else
            {
                const std::int64_t cycle = ue.drx.cycle_ticks();
                for (std::int64_t s = ue.drx.phase_ticks(); s < horizon_.ticks; s += cycle)
                {
                    awake.emplace_back(SimTime{s}, SimTime{s + ue.drx.on_ticks()});
                }
                awake.insert(awake.end(), ue.drx.inactivity_spans().begin(), ue.drx.inactivity_spans().end());
            }
            const auto monitor = subtract_intervals(merge_intervals(std::move(awake)), merge_intervals(ue.skip_windows));
            ActivityTimeline timeline;
            for (const auto& [a, b] : monitor)
            {
                timeline.add(a, b, PowerState::ActiveMonitor);
            }
            for (SimTime s : ue.rx_starts)
            {
                timeline.add(s, s + tti, PowerState::ActiveRx);
            }
            result_.traces.push_back(timeline.finalize(horizon_, cfg_.energy));
            result_.ledgers.push_back(ledger_from_trace(u, result_.traces.back(), cfg_.energy));
        }
    }

    const ScenarioConfig& cfg_;
    SchedulingPolicy policy_;
    std::uint64_t seed_;
    SimTime horizon_;
    Engine engine_;
    RngStream offset_rng_;
    std::optional<std::int64_t> skip_slots_;
    std::vector<Ue> ues_;
    std::set<std::int64_t> occasions_;
    ReplicationResult result_;
};

} // namespace nrps

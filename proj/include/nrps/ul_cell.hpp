// SPDX-License-Identifier: Apache-2.0
#pragma once

// Uplink small-data cell: RRC-based access, CG-SDT with a shared or dedicated
// preamble pool, and RACH-SDT, with fallback to the RRC path.

#include "nrps/cell_result.hpp"
#include "nrps/config.hpp"
#include "nrps/link.hpp"
#include "nrps/rrc_drx_energy.hpp"
#include "nrps/sdt_uplink.hpp"
#include "nrps/sim_core.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

namespace nrps
{

class UplinkCell
{
  public:
    UplinkCell(const ScenarioConfig& cfg, std::uint64_t seed, std::uint32_t replication_id, std::uint32_t cell)
        : cfg_(cfg), seed_(seed), horizon_(cfg.horizon()), preamble_rng_(seed, Stream::Preamble)
    {
        result_.replication_id = replication_id;
        result_.seed = seed;
        result_.cell = cell;
        result_.horizon = horizon_;
        result_.samples = SampleSeries("latency", "ms");
        cg_period_ = ms_to_symbols_ceil(cfg.uplink.cg_period_ms);
        rach_period_ = ms_to_symbols_ceil(cfg.uplink.rach_period_ms);
    }

    ReplicationResult run()
    {
        const auto k = static_cast<std::uint32_t>(cfg_.ues_per_cell);
        RngStream sinr_rng(seed_, Stream::Sinr);
        result_.profiles = draw_sinr_profiles(sinr_rng, k, cfg_.link);
        ues_.resize(k);
        for (std::uint32_t u = 0; u < k; ++u)
        {
            ues_[u].traffic = ue_stream(seed_, Stream::Traffic, u);
            ues_[u].link = ue_stream(seed_, Stream::Link, u);
            ues_[u].rrc = RrcMachine(cfg_.rrc.initial_state);
            if (cfg_.rrc.initial_state == RrcState::Connected)
            {
                ues_[u].connected_from = SimTime{0};
            }
        }
        for (std::uint32_t u = 0; u < k; ++u)
        {
            schedule_arrival(u, SimTime{0});
        }
        result_.events = engine_.run_until(horizon_);
        result_.trace_hash = engine_.trace_hash();
        finish();
        return std::move(result_);
    }

  private:
    enum class Access : std::uint8_t
    {
        None,
        Cg,
        RachSdt,
        RachRrc,
    };

    struct Ue
    {
        RngStream traffic{0, 0};
        RngStream link{0, 0};
        RrcMachine rrc;
        std::deque<std::uint64_t> queue;
        bool busy = false;
        Access access = Access::None;
        std::int32_t sdt_attempts = 0;
        std::int32_t decode_attempts = 0;
        bool fell_back = false;
        EventHandle suspend_timer;
        std::optional<SimTime> connected_from;
        std::vector<Interval64> active;
        std::vector<SimTime> tx_starts;
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
        Packet p;
        p.id = result_.packets.size();
        p.ue_id = u;
        p.direction = Direction::Uplink;
        p.size_bytes = cfg_.traffic.packet_size_bytes;
        p.arrival = engine_.now();
        result_.packets.push_back(p);
        ues_[u].queue.push_back(p.id);
        schedule_arrival(u, engine_.now());
        if (!ues_[u].busy)
        {
            start_head(u);
        }
    }

    void start_head(std::uint32_t u)
    {
        Ue& ue = ues_[u];
        ue.busy = true;
        ue.sdt_attempts = 0;
        ue.decode_attempts = 0;
        ue.fell_back = false;
        if (ue.rrc.state() == RrcState::Connected)
        {
            engine_.cancel(ue.suspend_timer);
            ue.access = Access::None;
            const SimTime tx = engine_.now() + ms_to_symbols_ceil(cfg_.uplink.connected_grant_ms);
            deliver_with_harq(u, tx);
            return;
        }
        switch (cfg_.uplink.mode)
        {
        case UplinkModeKind::CgSdt:
            wait_for(u, Access::Cg);
            break;
        case UplinkModeKind::RachSdt:
            wait_for(u, Access::RachSdt);
            break;
        case UplinkModeKind::RrcBased:
            wait_for(u, Access::RachRrc);
            break;
        }
    }

    void wait_for(std::uint32_t u, Access access)
    {
        ues_[u].access = access;
        const bool cg = access == Access::Cg;
        const SimTime period = cg ? cg_period_ : rach_period_;
        // Strictly after now: a UE cannot use the occasion it is already contending in.
        const SimTime at = align_up(engine_.now() + SimTime{1}, period.ticks);
        auto& waiting = cg ? cg_waiting_ : rach_waiting_;
        waiting[at.ticks].insert(u);
        if (at > horizon_ || waiting[at.ticks].size() > 1)
        {
            return;
        }
        engine_.schedule(at, cg ? EventKind::CgOccasion : EventKind::RachStep, u,
                         [this, cg] { cg ? on_cg_occasion() : on_rach_occasion(); });
    }

    std::set<std::uint32_t> take(std::map<std::int64_t, std::set<std::uint32_t>>& waiting)
    {
        auto it = waiting.find(engine_.now().ticks);
        if (it == waiting.end())
        {
            return {};
        }
        std::set<std::uint32_t> out = std::move(it->second);
        waiting.erase(it);
        return out;
    }

    void on_cg_occasion()
    {
        const SimTime now = engine_.now();
        const auto contenders = take(cg_waiting_);
        std::vector<PreambleAttempt> attempts;
        for (std::uint32_t u : contenders)
        {
            const auto preamble = cfg_.uplink.dedicated
                                      ? static_cast<std::int32_t>(u)
                                      : static_cast<std::int32_t>(preamble_rng_.uniform_int(0, cfg_.uplink.preamble_pool - 1));
            attempts.push_back(PreambleAttempt{u, preamble});
        }
        const auto res = cg_attempt_resolution(attempts);
        for (std::size_t i = 0; i < attempts.size(); ++i)
        {
            const std::uint32_t u = attempts[i].ue_id;
            Ue& ue = ues_[u];
            ++result_.counters.cg_attempts;
            ue.tx_starts.push_back(now);
            bool ok = false;
            if (res[i] == Resolution::Collision)
            {
                ++result_.counters.cg_collisions;
            }
            else
            {
                ok = transmission_outcome(ue.link, result_.profiles[u], ++ue.decode_attempts, cfg_.link) == TxOutcome::Ack;
            }
            if (ok)
            {
                const SimTime done = now + ms_to_symbols_ceil(cfg_.uplink.gnb_decode_ms);
                ue.active.emplace_back(now, done);
                schedule_completion(u, done);
            }
            else
            {
                sdt_failed(u, Access::Cg);
            }
        }
    }

    void on_rach_occasion()
    {
        const SimTime now = engine_.now();
        const auto contenders = take(rach_waiting_);
        std::vector<PreambleAttempt> attempts;
        for (std::uint32_t u : contenders)
        {
            attempts.push_back(PreambleAttempt{
                u, static_cast<std::int32_t>(preamble_rng_.uniform_int(0, cfg_.uplink.rach_preambles - 1))});
        }
        const auto res = cg_attempt_resolution(attempts);
        for (std::size_t i = 0; i < attempts.size(); ++i)
        {
            const std::uint32_t u = attempts[i].ue_id;
            Ue& ue = ues_[u];
            ++result_.counters.rach_attempts;
            ue.tx_starts.push_back(now);
            if (res[i] == Resolution::Collision)
            {
                ++result_.counters.rach_collisions;
                if (ue.access == Access::RachSdt)
                {
                    sdt_failed(u, Access::RachSdt);
                }
                else
                {
                    wait_for(u, Access::RachRrc);
                }
                continue;
            }
            if (ue.access == Access::RachSdt)
            {
                const SimTime tx = now + ms_to_symbols_ceil(cfg_.uplink.sdt_exchange_ms());
                ue.active.emplace_back(now, tx);
                if (transmission_outcome(ue.link, result_.profiles[u], ++ue.decode_attempts, cfg_.link) == TxOutcome::Ack)
                {
                    const SimTime done = tx + ms_to_symbols_ceil(cfg_.uplink.gnb_decode_ms);
                    ue.active.emplace_back(tx, done);
                    schedule_completion(u, done);
                }
                else
                {
                    sdt_failed(u, Access::RachSdt);
                }
                continue;
            }
            // RRC-based access: random access exchange, connection, setup signalling, data.
            const SimTime exchanged = now + ms_to_symbols_ceil(cfg_.uplink.rach_exchange_ms());
            const bool from_idle = ue.rrc.state() == RrcState::Idle;
            const SimTime connect = ue.rrc.connect(cfg_.rrc);
            ++(from_idle ? result_.counters.rrc_setups : result_.counters.rrc_resumes);
            const SimTime connected = exchanged + connect + ms_to_symbols_ceil(cfg_.uplink.rrc_setup_signaling_ms);
            ue.active.emplace_back(now, connected);
            ue.connected_from = connected;
            ue.decode_attempts = 0;
            deliver_with_harq(u, connected);
        }
    }

    void sdt_failed(std::uint32_t u, Access access)
    {
        Ue& ue = ues_[u];
        if (++ue.sdt_attempts >= cfg_.uplink.max_sdt_attempts)
        {
            ++result_.counters.sdt_fallbacks;
            ue.fell_back = true;
            wait_for(u, Access::RachRrc);
            return;
        }
        wait_for(u, access);
    }

    /// Data transmission over an established connection with HARQ retransmissions.
    void deliver_with_harq(std::uint32_t u, SimTime tx)
    {
        Ue& ue = ues_[u];
        const SimTime decode = ms_to_symbols_ceil(cfg_.uplink.gnb_decode_ms);
        const std::uint64_t pid = ue.queue.front();
        for (std::int32_t attempt = 1;; ++attempt)
        {
            ue.tx_starts.push_back(tx);
            result_.packets[pid].harq_attempts = attempt;
            const TxOutcome out = transmission_outcome(ue.link, result_.profiles[u], attempt, cfg_.link);
            if (out == TxOutcome::Ack)
            {
                schedule_completion(u, tx + decode);
                return;
            }
            if (attempt >= cfg_.link.max_harq_attempts)
            {
                schedule_completion(u, tx + decode, true);
                return;
            }
            ++result_.counters.harq_retransmissions;
            tx = tx + harq_retx_delay(cfg_.link);
        }
    }

    void schedule_completion(std::uint32_t u, SimTime at, bool lost = false)
    {
        engine_.schedule(at, EventKind::UplinkDelivery, u, [this, u, lost] { on_complete(u, lost); });
    }

    void on_complete(std::uint32_t u, bool lost)
    {
        Ue& ue = ues_[u];
        const std::uint64_t pid = ue.queue.front();
        ue.queue.pop_front();
        Packet& p = result_.packets[pid];
        if (lost)
        {
            p.lost = true;
            ++result_.counters.harq_losses;
        }
        else
        {
            p.delivered = engine_.now();
        }
        if (ue.rrc.state() != rrc_state_after_ul(cfg_.uplink.mode, ue.fell_back) &&
            ue.access != Access::None)
        {
            ++result_.counters.sdt_rrc_charges;
        }
        ue.busy = false;
        ue.access = Access::None;
        if (ue.rrc.state() == RrcState::Connected)
        {
            arm_suspend(u);
        }
        if (!ue.queue.empty())
        {
            start_head(u);
        }
    }

    void arm_suspend(std::uint32_t u)
    {
        Ue& ue = ues_[u];
        engine_.cancel(ue.suspend_timer);
        const SimTime at = engine_.now() + ms_to_symbols_ceil(cfg_.rrc.suspend_timer_ms);
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
            x.active.emplace_back(*x.connected_from, engine_.now());
            x.connected_from.reset();
        });
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
            result_.queued_ids.insert(result_.queued_ids.end(), ue.queue.begin(), ue.queue.end());
            if (ue.connected_from)
            {
                ue.active.emplace_back(*ue.connected_from, horizon_);
            }
            ActivityTimeline timeline;
            for (const auto& [a, b] : ue.active)
            {
                timeline.add(a, b, PowerState::ActiveMonitor);
            }
            for (SimTime s : ue.tx_starts)
            {
                timeline.add(s, s + tti, PowerState::ActiveRx);
            }
            result_.traces.push_back(timeline.finalize(horizon_, cfg_.energy));
            result_.ledgers.push_back(ledger_from_trace(u, result_.traces.back(), cfg_.energy));
        }
    }

    const ScenarioConfig& cfg_;
    std::uint64_t seed_;
    SimTime horizon_;
    SimTime cg_period_;
    SimTime rach_period_;
    Engine engine_;
    RngStream preamble_rng_;
    std::vector<Ue> ues_;
    std::map<std::int64_t, std::set<std::uint32_t>> cg_waiting_;
    std::map<std::int64_t, std::set<std::uint32_t>> rach_waiting_;
    ReplicationResult result_;
};

} // namespace nrps

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/errors.hpp"
#include "nrps/link.hpp"
#include "nrps/sim_core.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace nrps
{

struct InstantScheduling
{
};

struct FixedOffset
{
    std::int64_t k_min_symbols = 14;
};

struct DynamicOffset
{
    std::int64_t k_min_symbols = 14;
    std::int64_t k_max_symbols = 56;
};

using BasePolicy = std::variant<InstantScheduling, FixedOffset, DynamicOffset>;

struct PdcchSkipping
{
    std::int64_t skip_slots = 5;
    BasePolicy base = FixedOffset{};
};

using SchedulingPolicy = std::variant<InstantScheduling, FixedOffset, DynamicOffset, PdcchSkipping>;

inline BasePolicy base_policy(const SchedulingPolicy& policy)
{
    return std::visit(
        [](const auto& p) -> BasePolicy {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PdcchSkipping>)
            {
                return p.base;
            }
            else
            {
                return p;
            }
        },
        policy);
}

inline std::optional<std::int64_t> skip_slots_of(const SchedulingPolicy& policy)
{
    if (const auto* s = std::get_if<PdcchSkipping>(&policy))
    {
        return s->skip_slots;
    }
    return std::nullopt;
}

inline void validate_policy(const SchedulingPolicy& policy)
{
    const BasePolicy base = base_policy(policy);
    if (const auto* f = std::get_if<FixedOffset>(&base))
    {
        require(f->k_min_symbols >= 0, "sched.k_min_symbols", "offset must be non-negative");
    }
    if (const auto* d = std::get_if<DynamicOffset>(&base))
    {
        require(d->k_min_symbols >= 0, "sched.k_min_symbols", "offset must be non-negative");
        require(d->k_max_symbols >= d->k_min_symbols, "sched.k_max_symbols", "k_max must be >= k_min");
    }
    if (const auto s = skip_slots_of(policy))
    {
        require(*s >= 1, "sched.skip_slots", "skipping needs at least one slot");
    }
}

/// Grant-to-data offset for one grant under the base policy.
inline SimTime data_offset(const BasePolicy& base, RngStream& offset_rng)
{
    if (const auto* f = std::get_if<FixedOffset>(&base))
    {
        return SimTime{f->k_min_symbols};
    }
    if (const auto* d = std::get_if<DynamicOffset>(&base))
    {
        return SimTime{offset_rng.uniform_int(d->k_min_symbols, d->k_max_symbols)};
    }
    return SimTime{0};
}

struct PdcchGrid
{
    std::int64_t period_symbols = kTtiSymbols;
    std::int32_t capacity_grants_per_occasion = 2;

    void validate() const
    {
        require(period_symbols >= 1, "sched.pdcch_period_symbols", "period must be at least one symbol");
        require(capacity_grants_per_occasion >= 1, "sched.grants_per_occasion", "capacity must be at least one");
    }

    SimTime next_occasion(SimTime t) const noexcept { return align_up(t, period_symbols); }
    bool on_grid(SimTime t) const noexcept { return t.ticks % period_symbols == 0; }
};

/// Fixed processing pipeline around a grant.
struct ProcessingDelays
{
    std::int64_t gnb_processing_symbols = 4;
    std::int64_t ue_decode_symbols = 4;
    std::int64_t tti_symbols = kTtiSymbols;

    void validate() const
    {
        require(gnb_processing_symbols >= 0, "sched.gnb_processing_symbols", "must be non-negative");
        require(ue_decode_symbols >= 0, "sched.ue_decode_symbols", "must be non-negative");
        require(tti_symbols >= 1, "numerology.tti_symbols", "TTI must be at least one symbol");
    }

    /// Data start to decoded payload.
    SimTime reception() const noexcept { return SimTime{tti_symbols + ue_decode_symbols}; }
};

struct QueuedPacket
{
    std::uint64_t packet_id = 0;
    SimTime eligible_at; // arrival plus gNB processing
};

struct UeSchedState
{
    std::uint32_t ue_id = 0;
    double avg_throughput = 0.0;
    std::deque<QueuedPacket> dl_queue;
    std::optional<SimTime> skip_until;

    bool skipping(SimTime now) const noexcept { return skip_until && *skip_until > now; }
};

struct Grant
{
    std::uint32_t ue_id = 0;
    std::uint64_t packet_id = 0;
    SimTime grant_at;
    SimTime data_at;
};

inline constexpr double kPfEpsilon = 1e-9;
inline constexpr double kPfSmoothing = 0.05;
inline constexpr double kBitsPerGrant = 50.0 * 8.0;

/// Indices of backlogged UEs in proportional-fair order (metric descending, ue_id ascending on ties).
inline std::vector<std::size_t> pf_order(std::span<const UeSchedState> ues, std::span<const SinrProfile> profiles)
{
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < ues.size(); ++i)
    {
        if (!ues[i].dl_queue.empty())
        {
            order.push_back(i);
        }
    }
    auto metric = [&](std::size_t i) {
        return spectral_efficiency(profiles[ues[i].ue_id]) / std::max(ues[i].avg_throughput, kPfEpsilon);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = metric(a);
        const double mb = metric(b);
        if (ma != mb)
        {
            return ma > mb;
        }
        return ues[a].ue_id < ues[b].ue_id;
    });
    return order;
}

/// One PDCCH occasion: grants in PF order, skipping excluded UEs and UEs the predicate
/// reports unreachable (DRX off). Pops granted packets and updates PF averages.
inline std::vector<Grant> on_pdcch_occasion(SimTime now, const SchedulingPolicy& policy, const PdcchGrid& grid,
                                            std::span<UeSchedState> ues, std::span<const SinrProfile> profiles,
                                            RngStream& offset_rng,
                                            const std::function<bool(std::uint32_t)>& reachable = {})
{
    const BasePolicy base = base_policy(policy);
    std::vector<Grant> grants;
    for (std::size_t idx : pf_order(ues, profiles))
    {
        if (static_cast<std::int32_t>(grants.size()) >= grid.capacity_grants_per_occasion)
        {
            break;
        }
        UeSchedState& ue = ues[idx];
        if (ue.dl_queue.front().eligible_at > now || ue.skipping(now))
        {
            continue;
        }
        if (reachable && !reachable(ue.ue_id))
        {
            continue;
        }
        const QueuedPacket head = ue.dl_queue.front();
        ue.dl_queue.pop_front();
        grants.push_back(Grant{ue.ue_id, head.packet_id, now, now + data_offset(base, offset_rng)});
    }
    for (auto& ue : ues)
    {
        const bool served = std::any_of(grants.begin(), grants.end(), [&](const Grant& g) { return g.ue_id == ue.ue_id; });
        ue.avg_throughput = (1.0 - kPfSmoothing) * ue.avg_throughput + kPfSmoothing * (served ? kBitsPerGrant : 0.0);
    }
    return grants;
}

/// Opens a skipping window of skip_slots slots starting at now.
inline SimTime apply_skipping(UeSchedState& ue, SimTime now, std::int64_t skip_slots)
{
    if (skip_slots < 1)
    {
        throw std::invalid_argument("apply_skipping: skip_slots must be >= 1");
    }
    const SimTime until = now + slots(skip_slots);
    ue.skip_until = until;
    return until;
}

} // namespace nrps

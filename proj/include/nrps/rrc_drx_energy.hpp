// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/errors.hpp"
#include "nrps/sim_core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nrps
{

// ---------------------------------------------------------------------------
// RRC state machine

enum class RrcState : std::uint8_t
{
    Connected,
    Inactive,
    Idle,
};

enum class RrcEdge : std::uint8_t
{
    Suspend, // Connected -> Inactive
    Resume,  // Inactive -> Connected
    Release, // Inactive -> Idle
    Setup,   // Idle -> Connected
};

constexpr std::string_view to_string(RrcState s) noexcept
{
    switch (s)
    {
    case RrcState::Connected:
        return "connected";
    case RrcState::Inactive:
        return "inactive";
    case RrcState::Idle:
        return "idle";
    }
    return "?";
}

struct RrcConfig
{
    double resume_ms = 5.0;
    double setup_ms = 20.0;
    double suspend_timer_ms = 100.0; // data inactivity before Connected -> Inactive
    RrcState initial_state = RrcState::Connected;

    void validate() const
    {
        require(resume_ms >= 0.0, "rrc.resume_ms", "must be non-negative");
        require(resume_ms < setup_ms, "rrc.resume_ms", "resume from Inactive must be cheaper than setup from Idle");
        require(suspend_timer_ms >= 0.0, "rrc.suspend_timer_ms", "must be non-negative");
    }
};

/// Per-UE RRC context. Inactive keeps the anchor context; Idle drops it.
class RrcMachine
{
  public:
    explicit RrcMachine(RrcState initial = RrcState::Connected) : state_(initial) {}

    RrcState state() const noexcept { return state_; }
    bool has_anchor_context() const noexcept { return state_ != RrcState::Idle; }
    std::uint32_t resumes() const noexcept { return resumes_; }
    std::uint32_t setups() const noexcept { return setups_; }

    /// Applies a Fig.-1 edge and returns the signalling delay. Illegal edges are programming errors.
    SimTime transition(RrcEdge edge, const RrcConfig& cfg)
    {
        switch (edge)
        {
        case RrcEdge::Suspend:
            expect(RrcState::Connected, "suspend");
            state_ = RrcState::Inactive;
            return SimTime{0};
        case RrcEdge::Resume:
            expect(RrcState::Inactive, "resume");
            state_ = RrcState::Connected;
            ++resumes_;
            return ms_to_symbols_ceil(cfg.resume_ms);
        case RrcEdge::Release:
            expect(RrcState::Inactive, "release");
            state_ = RrcState::Idle;
            return SimTime{0};
        case RrcEdge::Setup:
            expect(RrcState::Idle, "setup");
            state_ = RrcState::Connected;
            ++setups_;
            return ms_to_symbols_ceil(cfg.setup_ms);
        }
        throw std::logic_error("rrc: unknown edge");
    }

    /// Resume from Inactive or setup from Idle, whichever applies.
    SimTime connect(const RrcConfig& cfg)
    {
        return transition(state_ == RrcState::Idle ? RrcEdge::Setup : RrcEdge::Resume, cfg);
    }

  private:
    void expect(RrcState from, const char* edge) const
    {
        if (state_ != from)
        {
            throw std::logic_error(std::string("rrc: illegal ") + edge + " from " + std::string(to_string(state_)));
        }
    }

    RrcState state_;
    std::uint32_t resumes_ = 0;
    std::uint32_t setups_ = 0;
};

// ---------------------------------------------------------------------------
// Connected-mode DRX

enum class DrxKind : std::uint8_t
{
    Short,
    Long,
};

struct DrxConfig
{
    bool enabled = false;
    DrxKind kind = DrxKind::Long;
    double cycle_ms = 40.0;
    double on_duration_ms = 2.0;
    double inactivity_timer_ms = 8.0;

    void validate() const
    {
        if (!enabled)
        {
            return;
        }
        if (kind == DrxKind::Short)
        {
            require(cycle_ms >= 2.0 && cycle_ms <= 640.0, "drx.cycle_ms", "short DRX cycle must lie in [2, 640] ms");
        }
        else
        {
            require(cycle_ms >= 10.0 && cycle_ms <= 10240.0, "drx.cycle_ms", "long DRX cycle must lie in [10, 10240] ms");
        }
        require(on_duration_ms > 0.0 && on_duration_ms <= cycle_ms, "drx.on_duration_ms",
                "on-duration must be positive and not exceed the cycle");
        require(inactivity_timer_ms >= 0.0, "drx.inactivity_timer_ms", "must be non-negative");
    }
};

/// Reachability of one UE: periodic on-durations plus inactivity-timer extensions.
class DrxTracker
{
  public:
    DrxTracker() = default;
    DrxTracker(const DrxConfig& cfg, std::int64_t phase_ticks)
        : enabled_(cfg.enabled),
          cycle_(ms_to_symbols_ceil(cfg.cycle_ms).ticks),
          on_(ms_to_symbols_ceil(cfg.on_duration_ms).ticks),
          inactivity_(ms_to_symbols_ceil(cfg.inactivity_timer_ms).ticks),
          phase_(cycle_ > 0 ? phase_ticks % cycle_ : 0)
    {
    }

    bool enabled() const noexcept { return enabled_; }
    SimTime active_until() const noexcept { return active_until_; }
    std::int64_t cycle_ticks() const noexcept { return cycle_; }
    std::int64_t on_ticks() const noexcept { return on_; }
    std::int64_t phase_ticks() const noexcept { return phase_; }

    bool in_on_duration(SimTime t) const noexcept
    {
        const std::int64_t rel = ((t.ticks - phase_) % cycle_ + cycle_) % cycle_;
        return rel < on_;
    }

    bool reachable(SimTime t) const noexcept { return !enabled_ || t < active_until_ || in_on_duration(t); }

    /// Earliest instant >= t at which the UE monitors PDCCH.
    SimTime next_reachable(SimTime t) const noexcept
    {
        if (reachable(t))
        {
            return t;
        }
        return align_up(t, cycle_, phase_);
    }

    /// Restarts the inactivity timer; returns the new end of the active window.
    SimTime on_grant(SimTime now)
    {
        const SimTime until = now + SimTime{inactivity_};
        if (!spans_.empty() && now <= spans_.back().second)
        {
            spans_.back().second = std::max(spans_.back().second, until);
        }
        else
        {
            spans_.emplace_back(now, until);
        }
        active_until_ = std::max(active_until_, until);
        return active_until_;
    }

    /// Merged inactivity-timer spans, in order.
    const std::vector<std::pair<SimTime, SimTime>>& inactivity_spans() const noexcept { return spans_; }

  private:
    bool enabled_ = false;
    std::int64_t cycle_ = 1;
    std::int64_t on_ = 1;
    std::int64_t inactivity_ = 0;
    std::int64_t phase_ = 0;
    SimTime active_until_{};
    std::vector<std::pair<SimTime, SimTime>> spans_;
};

// ---------------------------------------------------------------------------
// Sleep states and energy

enum class PowerState : std::uint8_t
{
    ActiveMonitor,
    ActiveRx,
    MicroSleep,
    LightSleep,
    DeepSleep,
    TransitionMicro,
    TransitionLight,
    TransitionDeep,
};

inline constexpr std::size_t kPowerStateCount = 8;

constexpr std::string_view to_string(PowerState s) noexcept
{
    constexpr std::array<std::string_view, kPowerStateCount> names{
        "active_monitor", "active_rx", "micro_sleep", "light_sleep", "deep_sleep",
        "transition_micro", "transition_light", "transition_deep"};
    return names[static_cast<std::size_t>(s)];
}

inline bool parse_power_state(std::string_view text, PowerState& out) noexcept
{
    for (std::size_t i = 0; i < kPowerStateCount; ++i)
    {
        if (to_string(static_cast<PowerState>(i)) == text)
        {
            out = static_cast<PowerState>(i);
            return true;
        }
    }
    return false;
}

constexpr bool is_sleep(PowerState s) noexcept
{
    return s == PowerState::MicroSleep || s == PowerState::LightSleep || s == PowerState::DeepSleep;
}

constexpr PowerState transition_of(PowerState sleep) noexcept
{
    switch (sleep)
    {
    case PowerState::MicroSleep:
        return PowerState::TransitionMicro;
    case PowerState::LightSleep:
        return PowerState::TransitionLight;
    default:
        return PowerState::TransitionDeep;
    }
}

/// Relative power units and entry+exit overheads of the sleep states.
struct EnergyModel
{
    double deep_power = 1.0;
    double light_power = 20.0;
    double micro_power = 45.0;
    double active_monitor_power = 100.0;
    double active_rx_power = 300.0;
    double deep_overhead_ms = 20.0;
    double light_overhead_ms = 6.0;
    double micro_overhead_ms = 1.0;

    void validate() const
    {
        require(deep_power >= 0.0, "energy.deep_power", "must be non-negative");
        require(deep_power < light_power && light_power < micro_power && micro_power < active_monitor_power,
                "energy.light_power", "powers must satisfy deep < light < micro < active");
        require(active_monitor_power <= active_rx_power, "energy.active_rx_power", "reception must cost at least monitoring");
        require(micro_overhead_ms > 0.0 && micro_overhead_ms < light_overhead_ms && light_overhead_ms < deep_overhead_ms,
                "energy.light_overhead_ms", "overheads must satisfy 0 < micro < light < deep");
    }

    double power(PowerState s) const noexcept
    {
        switch (s)
        {
        case PowerState::ActiveMonitor:
            return active_monitor_power;
        case PowerState::ActiveRx:
            return active_rx_power;
        case PowerState::MicroSleep:
            return micro_power;
        case PowerState::LightSleep:
            return light_power;
        case PowerState::DeepSleep:
            return deep_power;
        case PowerState::TransitionMicro:
            return 0.5 * (micro_power + active_monitor_power);
        case PowerState::TransitionLight:
            return 0.5 * (light_power + active_monitor_power);
        case PowerState::TransitionDeep:
            return 0.5 * (deep_power + active_monitor_power);
        }
        return 0.0;
    }

    SimTime overhead(PowerState sleep) const
    {
        switch (sleep)
        {
        case PowerState::MicroSleep:
            return ms_to_symbols_ceil(micro_overhead_ms);
        case PowerState::LightSleep:
            return ms_to_symbols_ceil(light_overhead_ms);
        case PowerState::DeepSleep:
            return ms_to_symbols_ceil(deep_overhead_ms);
        default:
            return SimTime{0};
        }
    }

    /// Deepest sleep state whose overhead fits strictly inside the gap; ActiveMonitor when none does.
    PowerState select_sleep_state(SimTime gap) const
    {
        for (PowerState s : {PowerState::DeepSleep, PowerState::LightSleep, PowerState::MicroSleep})
        {
            if (overhead(s) < gap)
            {
                return s;
            }
        }
        return PowerState::ActiveMonitor;
    }

    PowerState select_sleep_state_ms(double gap_ms) const
    {
        for (PowerState s : {PowerState::DeepSleep, PowerState::LightSleep, PowerState::MicroSleep})
        {
            const double oh = s == PowerState::DeepSleep ? deep_overhead_ms
                            : s == PowerState::LightSleep ? light_overhead_ms
                                                          : micro_overhead_ms;
            if (oh < gap_ms)
            {
                return s;
            }
        }
        return PowerState::ActiveMonitor;
    }
};

/// Per-UE totals. Durations are kept in symbol ticks and energy in power-units x ticks
/// so that the ledger equals a re-scan of the trace bit for bit.
struct EnergyLedger
{
    std::uint32_t ue_id = 0;
    std::array<std::int64_t, kPowerStateCount> duration_ticks{};
    std::array<double, kPowerStateCount> energy_unit_ticks{};
    std::array<std::uint32_t, kPowerStateCount> transition_count{};

    void accumulate(PowerState state, SimTime duration, const EnergyModel& model)
    {
        if (duration.ticks < 0)
        {
            throw std::invalid_argument("EnergyLedger::accumulate: negative duration");
        }
        if (duration.ticks == 0)
        {
            return;
        }
        const auto i = static_cast<std::size_t>(state);
        duration_ticks[i] += duration.ticks;
        energy_unit_ticks[i] += static_cast<double>(duration.ticks) * model.power(state);
        if (state == PowerState::TransitionMicro || state == PowerState::TransitionLight || state == PowerState::TransitionDeep)
        {
            ++transition_count[i];
        }
    }

    double total_unit_ticks() const noexcept
    {
        double total = 0.0;
        for (double e : energy_unit_ticks)
        {
            total += e;
        }
        return total;
    }

    /// Energy in power-units x ms.
    double total_energy() const noexcept { return total_unit_ticks() / static_cast<double>(kSymbolsPerMs); }

    double duration_ms(PowerState s) const noexcept { return symbols_to_ms(duration_ticks[static_cast<std::size_t>(s)]); }

    std::int64_t active_ticks() const noexcept
    {
        return duration_ticks[static_cast<std::size_t>(PowerState::ActiveMonitor)] +
               duration_ticks[static_cast<std::size_t>(PowerState::ActiveRx)];
    }

    std::int64_t transition_ticks() const noexcept
    {
        return duration_ticks[static_cast<std::size_t>(PowerState::TransitionMicro)] +
               duration_ticks[static_cast<std::size_t>(PowerState::TransitionLight)] +
               duration_ticks[static_cast<std::size_t>(PowerState::TransitionDeep)];
    }
};

struct TraceSegment
{
    SimTime start;
    SimTime end;
    PowerState state = PowerState::ActiveMonitor;
};

/// Collects receiver-on segments for one UE; finalize() fills every gap with the
/// sleep state chosen by the energy model (wake-up ramp placed at the end of the gap).
class ActivityTimeline
{
  public:
    void add(SimTime start, SimTime end, PowerState state)
    {
        if (end.ticks <= start.ticks)
        {
            return;
        }
        segments_.push_back(TraceSegment{start, end, state});
    }

    bool empty() const noexcept { return segments_.empty(); }

    /// Partition of [0, horizon) into active runs (Rx wins over Monitor), transitions and sleeps.
    std::vector<TraceSegment> finalize(SimTime horizon, const EnergyModel& model) const
    {
        std::vector<std::pair<std::int64_t, int>> edges; // (tick, delta code)
        edges.reserve(segments_.size() * 2);
        for (const auto& s : segments_)
        {
            const SimTime a = std::min(s.start, horizon);
            const SimTime b = std::min(s.end, horizon);
            if (b <= a)
            {
                continue;
            }
            const int code = s.state == PowerState::ActiveRx ? 2 : 1;
            edges.emplace_back(a.ticks, code);
            edges.emplace_back(b.ticks, -code);
        }
        std::sort(edges.begin(), edges.end());

        std::vector<TraceSegment> out;
        auto push = [&out](SimTime a, SimTime b, PowerState st) {
            if (b <= a)
            {
                return;
            }
            if (!out.empty() && out.back().state == st && out.back().end == a)
            {
                out.back().end = b;
                return;
            }
            out.push_back(TraceSegment{a, b, st});
        };
        auto push_gap = [&](SimTime a, SimTime b) {
            if (b <= a)
            {
                return;
            }
            const PowerState sleep = model.select_sleep_state(b - a);
            if (sleep == PowerState::ActiveMonitor)
            {
                push(a, b, PowerState::ActiveMonitor);
                return;
            }
            const SimTime oh = model.overhead(sleep);
            push(a, b - oh, sleep);
            push(b - oh, b, transition_of(sleep));
        };

        int monitors = 0;
        int receivers = 0;
        SimTime cursor{0};
        std::size_t i = 0;
        while (i < edges.size())
        {
            const SimTime t{edges[i].first};
            const bool was_active = monitors + receivers > 0;
            const PowerState st = receivers > 0 ? PowerState::ActiveRx : PowerState::ActiveMonitor;
            if (was_active)
            {
                push(cursor, t, st);
            }
            else
            {
                push_gap(cursor, t);
            }
            cursor = t;
            while (i < edges.size() && edges[i].first == t.ticks)
            {
                const int code = edges[i].second;
                if (code == 2 || code == -2)
                {
                    receivers += code > 0 ? 1 : -1;
                }
                else
                {
                    monitors += code;
                }
                ++i;
            }
        }
        push_gap(cursor, horizon);
        return out;
    }

  private:
    std::vector<TraceSegment> segments_;
};

inline EnergyLedger ledger_from_trace(std::uint32_t ue_id, const std::vector<TraceSegment>& trace, const EnergyModel& model)
{
    EnergyLedger ledger;
    ledger.ue_id = ue_id;
    for (const auto& seg : trace)
    {
        ledger.accumulate(seg.state, seg.end - seg.start, model);
    }
    return ledger;
}

} // namespace nrps

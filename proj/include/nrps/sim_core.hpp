// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace nrps
{

// 30 kHz numerology: 14 symbols per 0.5 ms slot, so one millisecond is 28 symbols.
inline constexpr std::int64_t kSymbolsPerSlot = 14;
inline constexpr std::int64_t kSlotDurationUs = 500;
inline constexpr std::int64_t kSymbolsPerMs = 28;
inline constexpr std::int64_t kTtiSymbols = 4;
inline constexpr int kScsKhz = 30;

/// Simulation clock in whole OFDM symbols since start.
struct SimTime
{
    std::int64_t ticks = 0;

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime other) const noexcept { return SimTime{ticks + other.ticks}; }
    constexpr SimTime operator-(SimTime other) const noexcept { return SimTime{ticks - other.ticks}; }
    constexpr SimTime& operator+=(SimTime other) noexcept
    {
        ticks += other.ticks;
        return *this;
    }

    static constexpr SimTime max() noexcept { return SimTime{std::numeric_limits<std::int64_t>::max()}; }
};

constexpr SimTime symbols(std::int64_t n) noexcept { return SimTime{n}; }
constexpr SimTime slots(std::int64_t n) noexcept { return SimTime{n * kSymbolsPerSlot}; }

/// Exact: one symbol lasts 500/14 us, i.e. 1/28 ms.
constexpr double symbols_to_ms(std::int64_t ticks) noexcept
{
    return static_cast<double>(ticks) / static_cast<double>(kSymbolsPerMs);
}
constexpr double to_ms(SimTime t) noexcept { return symbols_to_ms(t.ticks); }

/// Smallest tick count covering `ms`. Values within 1e-9 symbol of a boundary snap to it.
inline SimTime ms_to_symbols_ceil(double ms)
{
    const double raw = ms * static_cast<double>(kSymbolsPerMs);
    const double snapped = std::round(raw);
    if (std::abs(raw - snapped) < 1e-9)
    {
        return SimTime{static_cast<std::int64_t>(snapped)};
    }
    return SimTime{static_cast<std::int64_t>(std::ceil(raw))};
}

/// Next multiple of `period` at or after `t` (grid anchored at `offset`).
constexpr SimTime align_up(SimTime t, std::int64_t period, std::int64_t offset = 0) noexcept
{
    const std::int64_t rel = t.ticks - offset;
    const std::int64_t k = rel <= 0 ? -((-rel) / period) : (rel + period - 1) / period;
    return SimTime{offset + k * period};
}

// ---------------------------------------------------------------------------
// Random streams

namespace detail
{
inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
} // namespace detail

/// Stochastic subsystems; each draws from its own stream so toggling one feature
/// leaves the others' draws untouched.
enum class Stream : std::uint32_t
{
    Traffic = 0,
    Link = 1,
    Preamble = 2,
    Offset = 3,
    Paging = 4,
    Selection = 5,
    Sinr = 6,
    DrxPhase = 7,
};

/// xoshiro256** seeded through splitmix64 from (seed, stream_id). All
/// distributions are implemented here so sequences are identical on every platform.
class RngStream
{
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    {
        std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
        for (auto& word : state_)
        {
            word = detail::splitmix64(sm);
        }
    }
    RngStream(std::uint64_t seed, Stream stream) noexcept : RngStream(seed, static_cast<std::uint64_t>(stream)) {}

    std::uint64_t next_u64() noexcept
    {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo)
        {
            throw std::invalid_argument("uniform_int: empty range");
        }
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0)
        {
            return static_cast<std::int64_t>(next_u64());
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t x = next_u64();
        while (x >= limit)
        {
            x = next_u64();
        }
        return lo + static_cast<std::int64_t>(x % span);
    }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    double exponential(double rate) noexcept { return -std::log1p(-uniform01()) / rate; }

    /// Box-Muller; one draw consumes two uniforms so the stream position is predictable.
    double normal(double mean, double stddev) noexcept
    {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

  private:
    std::uint64_t state_[4]{};
};

/// Derives the per-replication seed for (seed, cell) pairs.
inline std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t cell) noexcept
{
    std::uint64_t s = seed * 0x100000001B3ULL + cell;
    return detail::splitmix64(s);
}

// ---------------------------------------------------------------------------
// Event engine

enum class EventKind : std::uint8_t
{
    PacketArrival,
    PdcchOccasion,
    PdschDelivery,
    HarqFeedback,
    DrxTimerExpiry,
    PagingOccasion,
    EpiOccasion,
    SsbBurst,
    CgOccasion,
    RachStep,
    RrcTimerExpiry,
    MeasurementFlush,
    SkipWindowExpiry,
    UplinkDelivery,
};

struct Event
{
    SimTime fire_at;
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::MeasurementFlush;
    std::uint32_t ue = 0;
};

struct EventHandle
{
    SimTime fire_at;
    std::uint64_t sequence = std::numeric_limits<std::uint64_t>::max();

    bool valid() const noexcept { return sequence != std::numeric_limits<std::uint64_t>::max(); }
};

/// Single-threaded future-event set ordered by (fire_at, sequence).
class Engine
{
  public:
    using Action = std::function<void()>;

    SimTime now() const noexcept { return now_; }
    std::size_t pending() const noexcept { return queue_.size(); }
    std::uint64_t processed() const noexcept { return processed_; }

    /// FNV-1a over every processed (fire_at, sequence, kind, ue) tuple.
    std::uint64_t trace_hash() const noexcept { return trace_hash_; }

    EventHandle schedule(SimTime at, EventKind kind, std::uint32_t ue, Action action)
    {
        if (at < now_)
        {
            throw std::logic_error("Engine::schedule: event at tick " + std::to_string(at.ticks) +
                                   " is before the clock (" + std::to_string(now_.ticks) + ")");
        }
        const std::uint64_t seq = next_sequence_++;
        queue_.emplace(Key{at.ticks, seq}, Entry{Event{at, seq, kind, ue}, std::move(action)});
        return EventHandle{at, seq};
    }

    EventHandle schedule_in(SimTime delay, EventKind kind, std::uint32_t ue, Action action)
    {
        return schedule(now_ + delay, kind, ue, std::move(action));
    }

    /// Returns false when the event already fired or was cancelled.
    bool cancel(EventHandle handle)
    {
        if (!handle.valid())
        {
            return false;
        }
        return queue_.erase(Key{handle.fire_at.ticks, handle.sequence}) > 0;
    }

    /// Processes every event with fire_at <= end, then sets the clock to end.
    std::size_t run_until(SimTime end)
    {
        if (end < now_)
        {
            throw std::logic_error("Engine::run_until: end precedes the clock");
        }
        std::size_t count = 0;
        while (!queue_.empty())
        {
            auto it = queue_.begin();
            if (it->first.first > end.ticks)
            {
                break;
            }
            Entry entry = std::move(it->second);
            queue_.erase(it);
            now_ = entry.event.fire_at;
            record(entry.event);
            ++count;
            ++processed_;
            if (entry.action)
            {
                entry.action();
            }
        }
        now_ = end;
        return count;
    }

  private:
    using Key = std::pair<std::int64_t, std::uint64_t>;
    struct Entry
    {
        Event event;
        Action action;
    };

    void record(const Event& ev) noexcept
    {
        auto mix = [this](std::uint64_t v) {
            for (int i = 0; i < 8; ++i)
            {
                trace_hash_ ^= (v >> (8 * i)) & 0xFF;
                trace_hash_ *= 0x100000001B3ULL;
            }
        };
        mix(static_cast<std::uint64_t>(ev.fire_at.ticks));
        mix(ev.sequence);
        mix(static_cast<std::uint64_t>(ev.kind));
        mix(ev.ue);
    }

    std::map<Key, Entry> queue_;
    SimTime now_{};
    std::uint64_t next_sequence_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t trace_hash_ = 0xCBF29CE484222325ULL;
};

} // namespace nrps

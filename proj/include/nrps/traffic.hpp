// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/sim_core.hpp"

#include <cmath>
#include <cstdint>
#include <optional>

namespace nrps
{

enum class Direction : std::uint8_t
{
    Downlink,
    Uplink,
};

/// One fixed-size payload; the unit of latency measurement.
struct Packet
{
    std::uint64_t id = 0;
    std::uint32_t ue_id = 0;
    Direction direction = Direction::Downlink;
    std::int32_t size_bytes = 50;
    SimTime arrival;
    std::optional<SimTime> delivered;
    std::int32_t harq_attempts = 0;
    bool lost = false;

    std::optional<SimTime> latency() const
    {
        if (!delivered)
        {
            return std::nullopt;
        }
        return *delivered - arrival;
    }
};

struct TrafficConfig
{
    double per_ue_arrival_rate = 100.0; // packets per second
    std::int32_t packet_size_bytes = 50;
    Direction direction = Direction::Downlink;
};

/// Exponential inter-arrival gap quantized up to whole symbols (at least one).
/// A non-positive rate disables the generator.
inline std::optional<SimTime> next_interarrival(RngStream& rng, double rate_per_s)
{
    if (!(rate_per_s > 0.0))
    {
        return std::nullopt;
    }
    const double gap_ms = rng.exponential(rate_per_s) * 1000.0;
    const double raw = gap_ms * static_cast<double>(kSymbolsPerMs);
    if (!std::isfinite(raw) || raw > 9.0e15)
    {
        return std::nullopt;
    }
    const auto ticks = static_cast<std::int64_t>(std::ceil(raw));
    return SimTime{ticks < 1 ? 1 : ticks};
}

/// Reporting convenience: K x rate x size x 8 bits per second.
constexpr double offered_load_per_cell(double ues_per_cell, double rate_per_s, double size_bytes) noexcept
{
    return ues_per_cell * rate_per_s * size_bytes * 8.0;
}

} // namespace nrps

// SPDX-License-Identifier: Apache-2.0
#pragma once

// Link-to-system abstraction: a quasi-static SINR draw per UE, a BLER target that
// stands in for MCS selection, and geometric BLER reduction per HARQ combining attempt.

#include "nrps/errors.hpp"
#include "nrps/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace nrps
{

enum class SinrClass : std::uint8_t
{
    High,
    Low,
};

struct SinrProfile
{
    std::uint32_t ue_id = 0;
    double mean_sinr_db = 0.0;
    SinrClass sinr_class = SinrClass::High;
};

struct LinkConfig
{
    double sinr_mean_db = 15.0;
    double sinr_stddev_db = 6.0;
    double first_tx_bler_target = 0.01;
    double retx_bler_multiplier = 0.1;
    std::int64_t harq_rtt_symbols = 56; // 4 slots
    std::int32_t max_harq_attempts = 4;
    double low_sinr_threshold_db = 5.0;
    double low_sinr_bler_factor = 10.0;

    void validate() const
    {
        require(first_tx_bler_target > 0.0 && first_tx_bler_target < 1.0, "link.first_tx_bler",
                "must satisfy 0 < first_tx_bler < 1");
        require(retx_bler_multiplier > 0.0 && retx_bler_multiplier < 1.0, "link.retx_bler_multiplier",
                "must satisfy 0 < retx_bler_multiplier < 1");
        require(harq_rtt_symbols > 0, "link.harq_rtt_symbols", "HARQ RTT must be positive");
        require(max_harq_attempts >= 1, "link.max_harq_attempts", "at least one attempt is required");
        require(sinr_stddev_db >= 0.0, "link.sinr_stddev_db", "standard deviation must be non-negative");
        require(low_sinr_bler_factor >= 1.0, "link.low_sinr_bler_factor", "factor must be >= 1");
    }
};

inline SinrClass classify_sinr(double sinr_db, const LinkConfig& cfg) noexcept
{
    return sinr_db < cfg.low_sinr_threshold_db ? SinrClass::Low : SinrClass::High;
}

/// One static profile per UE for the whole replication.
inline std::vector<SinrProfile> draw_sinr_profiles(RngStream& rng, std::size_t num_ues, const LinkConfig& cfg)
{
    std::vector<SinrProfile> out;
    out.reserve(num_ues);
    for (std::size_t i = 0; i < num_ues; ++i)
    {
        const double sinr = cfg.sinr_stddev_db > 0.0 ? rng.normal(cfg.sinr_mean_db, cfg.sinr_stddev_db) : cfg.sinr_mean_db;
        out.push_back(SinrProfile{static_cast<std::uint32_t>(i), sinr, classify_sinr(sinr, cfg)});
    }
    return out;
}

/// NACK probability of the given attempt (1-based), clamped to 1.
inline double nack_probability(const SinrProfile& profile, std::int32_t attempt, const LinkConfig& cfg)
{
    if (attempt < 1)
    {
        throw std::invalid_argument("nack_probability: attempt must be >= 1");
    }
    double p = cfg.first_tx_bler_target * std::pow(cfg.retx_bler_multiplier, attempt - 1);
    if (profile.sinr_class == SinrClass::Low)
    {
        p *= cfg.low_sinr_bler_factor;
    }
    return std::min(p, 1.0);
}

/// Probability that all of the first `attempts` transmissions fail.
inline double residual_loss(const SinrProfile& profile, std::int32_t attempts, const LinkConfig& cfg)
{
    double r = 1.0;
    for (std::int32_t a = 1; a <= attempts; ++a)
    {
        r *= nack_probability(profile, a, cfg);
    }
    return r;
}

enum class TxOutcome : std::uint8_t
{
    Ack,
    Nack,
    Lost, // attempt exceeds the HARQ budget
};

inline TxOutcome transmission_outcome(RngStream& rng, const SinrProfile& profile, std::int32_t attempt, const LinkConfig& cfg)
{
    if (attempt > cfg.max_harq_attempts)
    {
        return TxOutcome::Lost;
    }
    return rng.bernoulli(nack_probability(profile, attempt, cfg)) ? TxOutcome::Nack : TxOutcome::Ack;
}

inline SimTime harq_retx_delay(const LinkConfig& cfg) noexcept { return SimTime{cfg.harq_rtt_symbols}; }

/// Shannon spectral efficiency, used as the PF instantaneous-rate proxy.
inline double spectral_efficiency(const SinrProfile& profile) noexcept
{
    return std::log2(1.0 + std::pow(10.0, profile.mean_sinr_db / 10.0));
}

} // namespace nrps

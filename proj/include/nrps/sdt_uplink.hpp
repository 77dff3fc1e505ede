// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/errors.hpp"
#include "nrps/rrc_drx_energy.hpp"
#include "nrps/sim_core.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace nrps
{

enum class UplinkModeKind : std::uint8_t
{
    RrcBased,
    CgSdt,
    RachSdt,
};

enum class RachSteps : std::uint8_t
{
    TwoStep,
    FourStep,
};

struct UplinkConfig
{
    UplinkModeKind mode = UplinkModeKind::RrcBased;
    std::int32_t preamble_pool = 4; // CG preambles
    double cg_period_ms = 5.0;
    bool dedicated = false;
    RachSteps rach_steps = RachSteps::FourStep;
    double rach_period_ms = 10.0;
    std::int32_t rach_preambles = 64;
    double four_step_ms = 7.0;
    double two_step_ms = 3.0;
    double rrc_setup_signaling_ms = 10.0;
    double sdt_delta_ms = 2.0;          // RACH-SDT preamble exchange, four-step
    double sdt_delta_two_step_ms = 1.0; // RACH-SDT preamble exchange, two-step
    double gnb_decode_ms = 1.0;
    std::int32_t max_sdt_attempts = 8;
    double connected_grant_ms = 2.0; // SR-to-grant for a UE already Connected

    void validate(std::int32_t active_ul_ues) const
    {
        require(preamble_pool >= 1, "uplink.preamble_pool", "pool must hold at least one preamble");
        require(!dedicated || preamble_pool >= active_ul_ues, "uplink.dedicated",
                "dedicated preambles require preamble_pool >= number of active UL UEs");
        require(cg_period_ms > 0.0, "uplink.cg_period_ms", "must be positive");
        require(rach_period_ms > 0.0, "uplink.rach_period_ms", "must be positive");
        require(rach_preambles >= 1, "uplink.rach_preambles", "must be positive");
        require(four_step_ms >= 0.0 && two_step_ms >= 0.0, "uplink.four_step_ms", "exchange delays must be non-negative");
        require(sdt_delta_ms >= 0.0 && sdt_delta_two_step_ms >= 0.0, "uplink.sdt_delta_ms", "must be non-negative");
        require(gnb_decode_ms >= 0.0, "uplink.gnb_decode_ms", "must be non-negative");
        require(max_sdt_attempts >= 1, "uplink.max_sdt_attempts", "at least one attempt");
        require(connected_grant_ms >= 0.0, "uplink.connected_grant_ms", "must be non-negative");
    }

    double rach_exchange_ms() const noexcept { return rach_steps == RachSteps::FourStep ? four_step_ms : two_step_ms; }
    double sdt_exchange_ms() const noexcept
    {
        return rach_steps == RachSteps::FourStep ? sdt_delta_ms : sdt_delta_two_step_ms;
    }
};

struct PreambleAttempt
{
    std::uint32_t ue_id = 0;
    std::int32_t preamble_id = 0;
};

enum class Resolution : std::uint8_t
{
    Success,
    Collision,
};

/// Success iff the UE's preamble is unique within the occasion. Output follows input order.
inline std::vector<Resolution> cg_attempt_resolution(const std::vector<PreambleAttempt>& occasion)
{
    std::map<std::int32_t, int> uses;
    std::map<std::uint32_t, int> seen;
    for (const auto& a : occasion)
    {
        if (++seen[a.ue_id] > 1)
        {
            throw std::logic_error("cg_attempt_resolution: UE appears twice in one occasion");
        }
        ++uses[a.preamble_id];
    }
    std::vector<Resolution> out;
    out.reserve(occasion.size());
    for (const auto& a : occasion)
    {
        out.push_back(uses[a.preamble_id] == 1 ? Resolution::Success : Resolution::Collision);
    }
    return out;
}

/// Per-UE collision probability with n contenders drawing uniformly from P preambles.
inline double collision_probability(std::int32_t contenders, std::int32_t pool)
{
    if (contenders <= 1)
    {
        return 0.0;
    }
    return 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(pool), contenders - 1);
}

/// SDT keeps the UE Inactive; the RRC-based path (and SDT fallback) ends Connected.
constexpr RrcState rrc_state_after_ul(UplinkModeKind mode, bool fell_back = false) noexcept
{
    if (fell_back || mode == UplinkModeKind::RrcBased)
    {
        return RrcState::Connected;
    }
    return RrcState::Inactive;
}

} // namespace nrps

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/config.hpp"
#include "nrps/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace nrps
{

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{
        "fig7-instant",          "fig7-fixed",       "fig7-dynamic",           "fig7-skipping",
        "fig8-rrc",              "fig8-cg-dedicated", "fig8-cg-contended-5ue", "fig8-cg-contended-10ue",
        "fig8-rach-sdt",         "fig9-drx-ssb",     "fig9-epi-common",        "fig9-epi-group",
        "fig9-epi-group-rs",
    };
    return names;
}

namespace detail
{

inline ScenarioConfig downlink_base()
{
    ScenarioConfig c;
    c.kind = ScenarioKind::Downlink;
    c.cells = 18;
    c.ues_per_cell = 10;
    c.duration_s = 6.0;
    c.traffic.per_ue_arrival_rate = 100.0;
    c.link.harq_rtt_symbols = 12;
    c.rrc.initial_state = RrcState::Connected;
    return c;
}

inline ScenarioConfig uplink_base()
{
    ScenarioConfig c;
    c.kind = ScenarioKind::Uplink;
    c.cells = 18;
    c.ues_per_cell = 10;
    c.duration_s = 12.0;
    c.traffic.per_ue_arrival_rate = 50.0;
    c.traffic.direction = Direction::Uplink;
    c.rrc.initial_state = RrcState::Inactive;
    c.rrc.suspend_timer_ms = 10.0;
    c.uplink.preamble_pool = 16;
    return c;
}

inline ScenarioConfig paging_base()
{
    ScenarioConfig c;
    c.kind = ScenarioKind::Paging;
    c.cells = 18;
    c.ues_per_cell = 10;
    c.duration_s = 180.0;
    c.traffic.per_ue_arrival_rate = 0.0;
    c.rrc.initial_state = RrcState::Inactive;
    c.paging.page_rate_per_s = 0.2;
    return c;
}

} // namespace detail

/// Frozen scenario for a named figure curve. Throws ConfigError for unknown names.
inline ScenarioConfig preset(std::string_view name)
{
    ScenarioConfig c;
    if (name.starts_with("fig7-"))
    {
        c = detail::downlink_base();
        if (name == "fig7-instant")
        {
            c.sched.policy = "instant";
        }
        else if (name == "fig7-fixed")
        {
            c.sched.policy = "fixed";
        }
        else if (name == "fig7-dynamic")
        {
            c.sched.policy = "dynamic";
        }
        else if (name == "fig7-skipping")
        {
            c.sched.policy = "skipping";
            c.sched.skip_base = "fixed";
            c.sched.skip_slots = 5;
            c.sched.skip_fraction = 1.0;
        }
        else
        {
            throw ConfigError("scenario", "unknown preset '" + std::string(name) + "'");
        }
    }
    else if (name.starts_with("fig8-"))
    {
        c = detail::uplink_base();
        if (name == "fig8-rrc")
        {
            c.uplink.mode = UplinkModeKind::RrcBased;
        }
        else if (name == "fig8-cg-dedicated")
        {
            c.uplink.mode = UplinkModeKind::CgSdt;
            c.uplink.dedicated = true;
            c.uplink.preamble_pool = 16;
        }
        else if (name == "fig8-cg-contended-5ue")
        {
            c.uplink.mode = UplinkModeKind::CgSdt;
            c.uplink.preamble_pool = 4;
            c.ues_per_cell = 5;
            c.duration_s = 24.0;
        }
        else if (name == "fig8-cg-contended-10ue")
        {
            c.uplink.mode = UplinkModeKind::CgSdt;
            c.uplink.preamble_pool = 4;
        }
        else if (name == "fig8-rach-sdt")
        {
            c.uplink.mode = UplinkModeKind::RachSdt;
            c.uplink.rach_steps = RachSteps::FourStep;
        }
        else
        {
            throw ConfigError("scenario", "unknown preset '" + std::string(name) + "'");
        }
    }
    else if (name.starts_with("fig9-"))
    {
        c = detail::paging_base();
        if (name == "fig9-drx-ssb")
        {
            c.paging.epi_mode = EpiMode::None;
        }
        else if (name == "fig9-epi-common")
        {
            c.paging.epi_mode = EpiMode::Common;
        }
        else if (name == "fig9-epi-group")
        {
            c.paging.epi_mode = EpiMode::Grouped;
            c.paging.num_groups = 8;
        }
        else if (name == "fig9-epi-group-rs")
        {
            c.paging.epi_mode = EpiMode::Grouped;
            c.paging.num_groups = 8;
            c.paging.idle_rs = true;
        }
        else
        {
            throw ConfigError("scenario", "unknown preset '" + std::string(name) + "'");
        }
    }
    else
    {
        throw ConfigError("scenario", "unknown preset '" + std::string(name) + "'");
    }
    c.scenario = std::string(name);
    return c;
}

/// Builds a configuration from file text: the `scenario` key (or `base_preset`, which wins)
/// selects the starting point, every other key overrides it. The result is validated.
inline ScenarioConfig load_config(std::string_view text, const std::string& base_preset = {})
{
    const auto kv = parse_key_values(text);
    std::string base = base_preset;
    if (base.empty())
    {
        for (const auto& [k, v] : kv)
        {
            if (k == "scenario")
            {
                const std::string name = detail::parse_string(k, v);
                if (name != "custom")
                {
                    base = name;
                }
            }
        }
    }
    ScenarioConfig cfg = base.empty() ? ScenarioConfig{} : preset(base);
    for (const auto& field : config_fields())
    {
        for (const auto& [k, v] : kv)
        {
            if (k == field.key && !(k == "scenario" && !base_preset.empty()))
            {
                field.set(cfg, v);
            }
        }
    }
    cfg.traffic.direction = cfg.kind == ScenarioKind::Uplink ? Direction::Uplink : Direction::Downlink;
    cfg.validate();
    return cfg;
}

} // namespace nrps

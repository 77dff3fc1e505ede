// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scenario configuration and its flat `key = value` file format. One field table
// drives parsing, validation messages and the config echo, so an echo always
// parses back into the identical configuration.

#include "nrps/errors.hpp"
#include "nrps/link.hpp"
#include "nrps/paging.hpp"
#include "nrps/rrc_drx_energy.hpp"
#include "nrps/scheduler.hpp"
#include "nrps/sdt_uplink.hpp"
#include "nrps/traffic.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace nrps
{

enum class ScenarioKind : std::uint8_t
{
    Downlink,
    Uplink,
    Paging,
};

struct SchedParams
{
    std::string policy = "instant"; // instant | fixed | dynamic | skipping
    std::int64_t k_min_symbols = 14;
    std::int64_t k_max_symbols = 56;
    std::int64_t skip_slots = 5;
    std::string skip_base = "fixed";
    double skip_fraction = 1.0;
    PdcchGrid grid;
    ProcessingDelays delays;
};

/// Deployment entries recorded for provenance only; geometry is abstracted into the SINR draw.
struct DeploymentMetadata
{
    double bandwidth_mhz = 20.0;
    double carrier_ghz = 4.0;
    double bs_tx_power_dbm = 30.0;
    double ue_tx_power_dbm = 23.0;
    double bs_height_m = 10.0;
    double ue_height_m = 1.5;
    std::string antennas = "4x4";
    std::string channel = "InF-DH";
    std::string receiver = "L-MMSE-IRC";
};

struct ScenarioConfig
{
    std::string scenario = "custom";
    ScenarioKind kind = ScenarioKind::Downlink;
    std::int32_t cells = 18;
    std::int32_t ues_per_cell = 10;
    double duration_s = 6.0;
    std::vector<std::uint64_t> seeds{1};
    double outage_p = 1e-3;
    std::int32_t scs_khz = kScsKhz;
    std::int32_t tti_symbols = kTtiSymbols;
    TrafficConfig traffic;
    LinkConfig link;
    SchedParams sched;
    DrxConfig drx;
    RrcConfig rrc;
    PagingConfig paging;
    UplinkConfig uplink;
    EnergyModel energy;
    DeploymentMetadata meta;

    SchedulingPolicy scheduling_policy() const
    {
        auto base_of = [this](const std::string& name) -> BasePolicy {
            if (name == "instant")
            {
                return InstantScheduling{};
            }
            if (name == "fixed")
            {
                return FixedOffset{sched.k_min_symbols};
            }
            if (name == "dynamic")
            {
                return DynamicOffset{sched.k_min_symbols, sched.k_max_symbols};
            }
            throw ConfigError("sched.policy", "unknown policy '" + name + "'");
        };
        if (sched.policy == "skipping")
        {
            require(sched.skip_base != "skipping", "sched.skip_base", "skipping cannot be its own base");
            return PdcchSkipping{sched.skip_slots, base_of(sched.skip_base)};
        }
        return std::visit([](const auto& b) -> SchedulingPolicy { return b; }, base_of(sched.policy));
    }

    SimTime horizon() const { return ms_to_symbols_ceil(duration_s * 1000.0); }

    void validate() const
    {
        require(cells >= 1, "cells", "at least one cell");
        require(ues_per_cell >= 0, "ues_per_cell", "must be non-negative");
        require(duration_s > 0.0, "duration_s", "must be positive");
        require(!seeds.empty(), "seeds", "at least one seed");
        require(outage_p > 0.0 && outage_p < 1.0, "outage_p", "must lie in (0, 1)");
        require(scs_khz == kScsKhz, "numerology.scs_khz", "only 30 kHz sub-carrier spacing is modelled");
        require(tti_symbols == sched.delays.tti_symbols, "numerology.tti_symbols", "must equal the scheduler TTI");
        require(tti_symbols >= 1 && tti_symbols <= kSymbolsPerSlot, "numerology.tti_symbols", "must lie in [1, 14]");
        require(traffic.per_ue_arrival_rate >= 0.0, "traffic.rate_per_s", "arrival rate must be non-negative");
        require(traffic.packet_size_bytes > 0, "traffic.packet_size_bytes", "packet size must be positive");
        link.validate();
        validate_policy(scheduling_policy());
        require(sched.skip_fraction >= 0.0 && sched.skip_fraction <= 1.0, "sched.skip_fraction", "must lie in [0, 1]");
        sched.grid.validate();
        sched.delays.validate();
        drx.validate();
        rrc.validate();
        paging.validate();
        uplink.validate(ues_per_cell);
        require(kind != ScenarioKind::Uplink || uplink.mode == UplinkModeKind::RrcBased ||
                    rrc.initial_state == RrcState::Inactive,
                "rrc.initial_state", "small data transmission starts from Inactive");
        energy.validate();
    }
};

// ---------------------------------------------------------------------------
// Value formatting / parsing

namespace detail
{

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
    {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& raw)
{
    double v = 0.0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
    {
        throw ConfigError(key, "expected a number, got '" + raw + "'");
    }
    return v;
}

inline std::int64_t parse_int(const std::string& key, const std::string& raw)
{
    std::int64_t v = 0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
    {
        throw ConfigError(key, "expected an integer, got '" + raw + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& raw)
{
    if (raw == "true")
    {
        return true;
    }
    if (raw == "false")
    {
        return false;
    }
    throw ConfigError(key, "expected true or false, got '" + raw + "'");
}

inline std::string parse_string(const std::string& key, const std::string& raw)
{
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    {
        throw ConfigError(key, "expected a quoted string, got '" + raw + "'");
    }
    return raw.substr(1, raw.size() - 2);
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& raw)
{
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
    {
        throw ConfigError(key, "expected a list like [1, 2, 3]");
    }
    std::vector<std::uint64_t> out;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ','))
    {
        const std::string t = trim(item);
        if (t.empty())
        {
            continue;
        }
        const std::int64_t v = parse_int(key, t);
        if (v < 0)
        {
            throw ConfigError(key, "seeds must be non-negative");
        }
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

inline std::string quote(const std::string& s) { return "\"" + s + "\""; }

template <class E>
struct EnumName
{
    E value;
    const char* name;
};

template <class E, std::size_t N>
E parse_enum(const std::string& key, const std::string& raw, const EnumName<E> (&table)[N])
{
    const std::string s = parse_string(key, raw);
    for (const auto& e : table)
    {
        if (s == e.name)
        {
            return e.value;
        }
    }
    throw ConfigError(key, "unknown value '" + s + "'");
}

template <class E, std::size_t N>
std::string enum_name(E v, const EnumName<E> (&table)[N])
{
    for (const auto& e : table)
    {
        if (e.value == v)
        {
            return quote(e.name);
        }
    }
    return quote("?");
}

inline constexpr EnumName<ScenarioKind> kKindNames[] = {
    {ScenarioKind::Downlink, "downlink"}, {ScenarioKind::Uplink, "uplink"}, {ScenarioKind::Paging, "paging"}};
inline constexpr EnumName<DrxKind> kDrxKindNames[] = {{DrxKind::Short, "short"}, {DrxKind::Long, "long"}};
inline constexpr EnumName<RrcState> kRrcNames[] = {
    {RrcState::Connected, "connected"}, {RrcState::Inactive, "inactive"}, {RrcState::Idle, "idle"}};
inline constexpr EnumName<EpiMode> kEpiNames[] = {
    {EpiMode::None, "none"}, {EpiMode::Common, "common"}, {EpiMode::Grouped, "grouped"}};
inline constexpr EnumName<UplinkModeKind> kUlNames[] = {
    {UplinkModeKind::RrcBased, "rrc"}, {UplinkModeKind::CgSdt, "cg"}, {UplinkModeKind::RachSdt, "rach-sdt"}};
inline constexpr EnumName<RachSteps> kStepNames[] = {{RachSteps::TwoStep, "two-step"}, {RachSteps::FourStep, "four-step"}};

} // namespace detail

struct ConfigField
{
    std::string key;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

/// Every behaviour-relevant parameter, in echo order.
inline const std::vector<ConfigField>& config_fields()
{
    using namespace detail;
    using C = ScenarioConfig;
    static const std::vector<ConfigField> fields = [] {
        std::vector<ConfigField> f;
        auto dbl = [&f](std::string key, auto member) {
            f.push_back({key, [member, key](C& c, const std::string& r) { member(c) = parse_double(key, r); },
                         [member](const C& c) { return format_double(member(const_cast<C&>(c))); }});
        };
        auto integer = [&f](std::string key, auto member) {
            f.push_back({key,
                         [member, key](C& c, const std::string& r) {
                             using T = std::decay_t<decltype(member(c))>;
                             member(c) = static_cast<T>(parse_int(key, r));
                         },
                         [member](const C& c) { return std::to_string(member(const_cast<C&>(c))); }});
        };
        auto boolean = [&f](std::string key, auto member) {
            f.push_back({key, [member, key](C& c, const std::string& r) { member(c) = parse_bool(key, r); },
                         [member](const C& c) { return std::string(member(const_cast<C&>(c)) ? "true" : "false"); }});
        };
        auto str = [&f](std::string key, auto member) {
            f.push_back({key, [member, key](C& c, const std::string& r) { member(c) = parse_string(key, r); },
                         [member](const C& c) { return quote(member(const_cast<C&>(c))); }});
        };
        auto enumeration = [&f](std::string key, auto member, const auto& table) {
            f.push_back({key, [member, key, &table](C& c, const std::string& r) { member(c) = parse_enum(key, r, table); },
                         [member, &table](const C& c) { return enum_name(member(const_cast<C&>(c)), table); }});
        };

        str("scenario", [](C& c) -> auto& { return c.scenario; });
        enumeration("kind", [](C& c) -> auto& { return c.kind; }, kKindNames);
        integer("cells", [](C& c) -> auto& { return c.cells; });
        integer("ues_per_cell", [](C& c) -> auto& { return c.ues_per_cell; });
        dbl("duration_s", [](C& c) -> auto& { return c.duration_s; });
        f.push_back({"seeds", [](C& c, const std::string& r) { c.seeds = parse_u64_list("seeds", r); },
                     [](const C& c) {
                         std::string s = "[";
                         for (std::size_t i = 0; i < c.seeds.size(); ++i)
                         {
                             s += (i ? ", " : "") + std::to_string(c.seeds[i]);
                         }
                         return s + "]";
                     }});
        dbl("outage_p", [](C& c) -> auto& { return c.outage_p; });
        integer("numerology.scs_khz", [](C& c) -> auto& { return c.scs_khz; });
        integer("numerology.tti_symbols", [](C& c) -> auto& { return c.tti_symbols; });

        dbl("traffic.rate_per_s", [](C& c) -> auto& { return c.traffic.per_ue_arrival_rate; });
        integer("traffic.packet_size_bytes", [](C& c) -> auto& { return c.traffic.packet_size_bytes; });

        dbl("link.sinr_mean_db", [](C& c) -> auto& { return c.link.sinr_mean_db; });
        dbl("link.sinr_stddev_db", [](C& c) -> auto& { return c.link.sinr_stddev_db; });
        dbl("link.first_tx_bler", [](C& c) -> auto& { return c.link.first_tx_bler_target; });
        dbl("link.retx_bler_multiplier", [](C& c) -> auto& { return c.link.retx_bler_multiplier; });
        integer("link.harq_rtt_symbols", [](C& c) -> auto& { return c.link.harq_rtt_symbols; });
        integer("link.max_harq_attempts", [](C& c) -> auto& { return c.link.max_harq_attempts; });
        dbl("link.low_sinr_threshold_db", [](C& c) -> auto& { return c.link.low_sinr_threshold_db; });
        dbl("link.low_sinr_bler_factor", [](C& c) -> auto& { return c.link.low_sinr_bler_factor; });

        str("sched.policy", [](C& c) -> auto& { return c.sched.policy; });
        integer("sched.k_min_symbols", [](C& c) -> auto& { return c.sched.k_min_symbols; });
        integer("sched.k_max_symbols", [](C& c) -> auto& { return c.sched.k_max_symbols; });
        integer("sched.skip_slots", [](C& c) -> auto& { return c.sched.skip_slots; });
        str("sched.skip_base", [](C& c) -> auto& { return c.sched.skip_base; });
        dbl("sched.skip_fraction", [](C& c) -> auto& { return c.sched.skip_fraction; });
        integer("sched.pdcch_period_symbols", [](C& c) -> auto& { return c.sched.grid.period_symbols; });
        integer("sched.grants_per_occasion", [](C& c) -> auto& { return c.sched.grid.capacity_grants_per_occasion; });
        integer("sched.gnb_processing_symbols", [](C& c) -> auto& { return c.sched.delays.gnb_processing_symbols; });
        integer("sched.ue_decode_symbols", [](C& c) -> auto& { return c.sched.delays.ue_decode_symbols; });
        integer("sched.tti_symbols", [](C& c) -> auto& { return c.sched.delays.tti_symbols; });

        boolean("drx.enabled", [](C& c) -> auto& { return c.drx.enabled; });
        enumeration("drx.kind", [](C& c) -> auto& { return c.drx.kind; }, kDrxKindNames);
        dbl("drx.cycle_ms", [](C& c) -> auto& { return c.drx.cycle_ms; });
        dbl("drx.on_duration_ms", [](C& c) -> auto& { return c.drx.on_duration_ms; });
        dbl("drx.inactivity_timer_ms", [](C& c) -> auto& { return c.drx.inactivity_timer_ms; });

        dbl("rrc.resume_ms", [](C& c) -> auto& { return c.rrc.resume_ms; });
        dbl("rrc.setup_ms", [](C& c) -> auto& { return c.rrc.setup_ms; });
        dbl("rrc.suspend_timer_ms", [](C& c) -> auto& { return c.rrc.suspend_timer_ms; });
        enumeration("rrc.initial_state", [](C& c) -> auto& { return c.rrc.initial_state; }, kRrcNames);

        dbl("paging.po_period_ms", [](C& c) -> auto& { return c.paging.po_period_ms; });
        enumeration("paging.epi_mode", [](C& c) -> auto& { return c.paging.epi_mode; }, kEpiNames);
        integer("paging.num_groups", [](C& c) -> auto& { return c.paging.num_groups; });
        dbl("paging.epi_lead_ms", [](C& c) -> auto& { return c.paging.epi_lead_ms; });
        boolean("paging.idle_rs", [](C& c) -> auto& { return c.paging.idle_rs; });
        dbl("paging.ssb_period_ms", [](C& c) -> auto& { return c.paging.ssb_period_ms; });
        dbl("paging.po_decode_ms", [](C& c) -> auto& { return c.paging.po_decode_ms; });
        dbl("paging.epi_decode_ms", [](C& c) -> auto& { return c.paging.epi_decode_ms; });
        dbl("paging.ssb_active_ms", [](C& c) -> auto& { return c.paging.ssb_active_ms; });
        dbl("paging.rs_sync_ms", [](C& c) -> auto& { return c.paging.rs_sync_ms; });
        dbl("paging.low_sinr_wake_ahead_ms", [](C& c) -> auto& { return c.paging.low_sinr_wake_ahead_ms; });
        integer("paging.low_sinr_num_ssbs", [](C& c) -> auto& { return c.paging.low_sinr_num_ssbs; });
        dbl("paging.page_rate_per_s", [](C& c) -> auto& { return c.paging.page_rate_per_s; });

        enumeration("uplink.mode", [](C& c) -> auto& { return c.uplink.mode; }, kUlNames);
        integer("uplink.preamble_pool", [](C& c) -> auto& { return c.uplink.preamble_pool; });
        dbl("uplink.cg_period_ms", [](C& c) -> auto& { return c.uplink.cg_period_ms; });
        boolean("uplink.dedicated", [](C& c) -> auto& { return c.uplink.dedicated; });
        enumeration("uplink.rach_steps", [](C& c) -> auto& { return c.uplink.rach_steps; }, kStepNames);
        dbl("uplink.rach_period_ms", [](C& c) -> auto& { return c.uplink.rach_period_ms; });
        integer("uplink.rach_preambles", [](C& c) -> auto& { return c.uplink.rach_preambles; });
        dbl("uplink.four_step_ms", [](C& c) -> auto& { return c.uplink.four_step_ms; });
        dbl("uplink.two_step_ms", [](C& c) -> auto& { return c.uplink.two_step_ms; });
        dbl("uplink.rrc_setup_signaling_ms", [](C& c) -> auto& { return c.uplink.rrc_setup_signaling_ms; });
        dbl("uplink.sdt_delta_ms", [](C& c) -> auto& { return c.uplink.sdt_delta_ms; });
        dbl("uplink.sdt_delta_two_step_ms", [](C& c) -> auto& { return c.uplink.sdt_delta_two_step_ms; });
        dbl("uplink.gnb_decode_ms", [](C& c) -> auto& { return c.uplink.gnb_decode_ms; });
        integer("uplink.max_sdt_attempts", [](C& c) -> auto& { return c.uplink.max_sdt_attempts; });
        dbl("uplink.connected_grant_ms", [](C& c) -> auto& { return c.uplink.connected_grant_ms; });

        dbl("energy.deep_power", [](C& c) -> auto& { return c.energy.deep_power; });
        dbl("energy.light_power", [](C& c) -> auto& { return c.energy.light_power; });
        dbl("energy.micro_power", [](C& c) -> auto& { return c.energy.micro_power; });
        dbl("energy.active_monitor_power", [](C& c) -> auto& { return c.energy.active_monitor_power; });
        dbl("energy.active_rx_power", [](C& c) -> auto& { return c.energy.active_rx_power; });
        dbl("energy.deep_overhead_ms", [](C& c) -> auto& { return c.energy.deep_overhead_ms; });
        dbl("energy.light_overhead_ms", [](C& c) -> auto& { return c.energy.light_overhead_ms; });
        dbl("energy.micro_overhead_ms", [](C& c) -> auto& { return c.energy.micro_overhead_ms; });

        dbl("meta.bandwidth_mhz", [](C& c) -> auto& { return c.meta.bandwidth_mhz; });
        dbl("meta.carrier_ghz", [](C& c) -> auto& { return c.meta.carrier_ghz; });
        dbl("meta.bs_tx_power_dbm", [](C& c) -> auto& { return c.meta.bs_tx_power_dbm; });
        dbl("meta.ue_tx_power_dbm", [](C& c) -> auto& { return c.meta.ue_tx_power_dbm; });
        dbl("meta.bs_height_m", [](C& c) -> auto& { return c.meta.bs_height_m; });
        dbl("meta.ue_height_m", [](C& c) -> auto& { return c.meta.ue_height_m; });
        str("meta.antennas", [](C& c) -> auto& { return c.meta.antennas; });
        str("meta.channel", [](C& c) -> auto& { return c.meta.channel; });
        str("meta.receiver", [](C& c) -> auto& { return c.meta.receiver; });
        return f;
    }();
    return fields;
}

/// Canonical echo: one `key = value` line per field, in table order.
inline std::string config_echo(const ScenarioConfig& cfg)
{
    std::string out;
    for (const auto& field : config_fields())
    {
        out += field.key + " = " + field.get(cfg) + "\n";
    }
    return out;
}

/// Raw key/value pairs in file order. Duplicate keys, malformed lines and unknown keys are errors.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::map<std::string, int> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        // Strip comments outside quotes.
        bool in_quotes = false;
        std::size_t cut = line.size();
        for (std::size_t i = 0; i < line.size(); ++i)
        {
            if (line[i] == '"')
            {
                in_quotes = !in_quotes;
            }
            else if (line[i] == '#' && !in_quotes)
            {
                cut = i;
                break;
            }
        }
        const std::string content = detail::trim(line.substr(0, cut));
        if (content.empty())
        {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("line " + std::to_string(line_no), "expected `key = value`");
        }
        std::string key = detail::trim(std::string_view(content).substr(0, eq));
        std::string value = detail::trim(std::string_view(content).substr(eq + 1));
        if (key.empty() || value.empty())
        {
            throw ConfigError("line " + std::to_string(line_no), "expected `key = value`");
        }
        if (seen[key]++ > 0)
        {
            throw ConfigError(key, "duplicate key");
        }
        bool known = false;
        for (const auto& f : config_fields())
        {
            known = known || f.key == key;
        }
        if (!known)
        {
            throw ConfigError(key, "unknown key");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

} // namespace nrps

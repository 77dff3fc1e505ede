// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batch execution: one replication per (seed, cell), optional parallel workers,
// deterministic merge, CSV/CCDF/energy/manifest output written atomically.

#include "nrps/cell_result.hpp"
#include "nrps/config.hpp"
#include "nrps/dl_cell.hpp"
#include "nrps/metrics.hpp"
#include "nrps/paging_cell.hpp"
#include "nrps/ul_cell.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nrps
{

inline constexpr const char* kToolVersion = "1.0.0";

inline std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes)
    {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i)
    {
        buf[i] = digits[v & 0xF];
        v >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

/// Runs one replication and audits it; any invariant fault throws.
inline ReplicationResult run_replication(const ScenarioConfig& cfg, std::uint64_t seed, std::uint32_t cell,
                                         std::uint32_t replication_id)
{
    const std::uint64_t rs = replication_seed(seed, cell);
    ReplicationResult r;
    switch (cfg.kind)
    {
    case ScenarioKind::Downlink:
        r = DownlinkCell(cfg, rs, replication_id, cell).run();
        break;
    case ScenarioKind::Uplink:
        r = UplinkCell(cfg, rs, replication_id, cell).run();
        break;
    case ScenarioKind::Paging:
        r = PagingCell(cfg, rs, replication_id, cell).run();
        break;
    }
    r.seed = seed;
    const AuditResult audit = r.audit();
    if (!audit.pass)
    {
        throw std::logic_error("conservation audit failed in replication " + std::to_string(replication_id) + ": " +
                               std::to_string(audit.unaccounted.size()) + " unaccounted, " +
                               std::to_string(audit.double_counted.size()) + " double-counted");
    }
    if (r.counters.grants_during_skip || r.counters.grants_while_unreachable || r.counters.paged_skips ||
        r.counters.sdt_rrc_charges)
    {
        throw std::logic_error("protocol invariant violated in replication " + std::to_string(replication_id));
    }
    return r;
}

struct BatchResult
{
    ScenarioConfig cfg;
    std::vector<ReplicationResult> replications; // (seed, cell) order
    SampleSeries merged;
    OutageReport outage;
    CellCounters totals;

    std::vector<double> values() const { return merged.values(); }
};

inline CellCounters& operator+=(CellCounters& a, const CellCounters& b)
{
    a.grants += b.grants;
    a.grants_during_skip += b.grants_during_skip;
    a.grants_while_unreachable += b.grants_while_unreachable;
    a.harq_retransmissions += b.harq_retransmissions;
    a.harq_losses += b.harq_losses;
    a.paging_episodes += b.paging_episodes;
    a.paged_episodes += b.paged_episodes;
    a.paged_skips += b.paged_skips;
    a.po_skips += b.po_skips;
    a.false_alarms += b.false_alarms;
    a.cg_attempts += b.cg_attempts;
    a.cg_collisions += b.cg_collisions;
    a.rach_attempts += b.rach_attempts;
    a.rach_collisions += b.rach_collisions;
    a.sdt_fallbacks += b.sdt_fallbacks;
    a.rrc_resumes += b.rrc_resumes;
    a.rrc_setups += b.rrc_setups;
    a.sdt_rrc_charges += b.sdt_rrc_charges;
    return a;
}

/// Runs every (seed, cell) replication on up to `jobs` threads; results never depend on `jobs`.
inline BatchResult run_batch(const ScenarioConfig& cfg, unsigned jobs = 1)
{
    cfg.validate();
    struct Job
    {
        std::uint64_t seed;
        std::uint32_t cell;
    };
    std::vector<Job> plan;
    for (std::uint64_t seed : cfg.seeds)
    {
        for (std::int32_t cell = 0; cell < cfg.cells; ++cell)
        {
            plan.push_back(Job{seed, static_cast<std::uint32_t>(cell)});
        }
    }
    BatchResult batch;
    batch.cfg = cfg;
    batch.replications.resize(plan.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.size() || failed.load())
            {
                return;
            }
            try
            {
                batch.replications[i] = run_replication(cfg, plan[i].seed, plan[i].cell, static_cast<std::uint32_t>(i));
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };
    const unsigned n = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
    if (n == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < n; ++t)
        {
            threads.emplace_back(worker);
        }
        for (auto& t : threads)
        {
            t.join();
        }
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
    const std::string series = batch.replications.empty() ? "latency" : batch.replications.front().samples.name();
    batch.merged = SampleSeries(series, "ms");
    for (const auto& r : batch.replications)
    {
        batch.merged.append(r.samples);
        batch.totals += r.counters;
    }
    batch.merged.seal();
    const auto v = batch.merged.values();
    batch.outage = outage_latency(v, cfg.outage_p, series);
    return batch;
}

// ---------------------------------------------------------------------------
// Output

namespace detail
{

inline std::string num(double v)
{
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline std::string samples_csv(const BatchResult& b)
{
    std::string out = "replication_id,ue_id,value_ms\n";
    for (const auto& s : b.merged.samples())
    {
        out += std::to_string(s.replication_id) + ',' + std::to_string(s.ue_id) + ',' + detail::num(s.value_ms) + '\n';
    }
    return out;
}

inline std::string ccdf_csv(const BatchResult& b)
{
    std::string out = "x_ms,exceedance\n";
    const auto v = b.merged.values();
    for (const auto& p : ccdf(v))
    {
        out += detail::num(p.x) + ',' + detail::num(p.exceedance) + '\n';
    }
    return out;
}

/// Globally unique UE id across replications.
inline std::uint64_t global_ue(const BatchResult& b, std::size_t rep, std::uint32_t local)
{
    return static_cast<std::uint64_t>(rep) * static_cast<std::uint64_t>(b.cfg.ues_per_cell) + local;
}

inline std::string energy_csv(const BatchResult& b)
{
    std::string out = "ue_id,state,duration_ms,energy_units\n";
    for (std::size_t r = 0; r < b.replications.size(); ++r)
    {
        const auto& ledgers = b.replications[r].ledgers;
        for (std::uint32_t u = 0; u < ledgers.size(); ++u)
        {
            for (std::size_t s = 0; s < kPowerStateCount; ++s)
            {
                const auto st = static_cast<PowerState>(s);
                out += std::to_string(global_ue(b, r, u)) + ',' + std::string(to_string(st)) + ',' +
                       detail::num(ledgers[u].duration_ms(st)) + ',' +
                       detail::num(ledgers[u].energy_unit_ticks[s] / static_cast<double>(kSymbolsPerMs)) + '\n';
            }
        }
    }
    return out;
}

inline std::string trace_csv(const BatchResult& b)
{
    std::string out = "replication_id,ue_id,start_tick,end_tick,state\n";
    for (std::size_t r = 0; r < b.replications.size(); ++r)
    {
        const auto& traces = b.replications[r].traces;
        for (std::uint32_t u = 0; u < traces.size(); ++u)
        {
            for (const auto& seg : traces[u])
            {
                out += std::to_string(r) + ',' + std::to_string(global_ue(b, r, u)) + ',' + std::to_string(seg.start.ticks) +
                       ',' + std::to_string(seg.end.ticks) + ',' + std::string(to_string(seg.state)) + '\n';
            }
        }
    }
    return out;
}

struct OutputFile
{
    std::string name;
    std::string content;
};

/// All artifacts of a batch, manifest last.
inline std::vector<OutputFile> render_outputs(const BatchResult& b, bool with_trace)
{
    const std::string series = b.merged.name();
    std::vector<OutputFile> files{
        {"samples_" + series + ".csv", samples_csv(b)},
        {"ccdf_" + series + ".csv", ccdf_csv(b)},
        {"energy.csv", energy_csv(b)},
        {"config_echo.txt", config_echo(b.cfg)},
    };
    if (with_trace)
    {
        files.push_back({"trace.csv", trace_csv(b)});
    }
    std::string m;
    m += "tool = nrps " + std::string(kToolVersion) + "\n";
    m += "scenario = " + b.cfg.scenario + "\n";
    m += "config_hash = fnv1a64:" + hex64(fnv1a64(config_echo(b.cfg))) + "\n";
    m += "seeds = ";
    for (std::size_t i = 0; i < b.cfg.seeds.size(); ++i)
    {
        m += (i ? "," : "") + std::to_string(b.cfg.seeds[i]);
    }
    m += "\ncells = " + std::to_string(b.cfg.cells) + "\n";
    m += "replications = " + std::to_string(b.replications.size()) + "\n";
    m += "samples = " + std::to_string(b.merged.size()) + "\n";
    m += "outage_p = " + detail::num(b.outage.outage_probability) + "\n";
    m += "outage_ms = " + detail::num(b.outage.outage_value) + "\n";
    m += "low_confidence = " + std::string(b.outage.low_confidence ? "true" : "false") + "\n";
    for (const auto& f : files)
    {
        m += "file = " + f.name + " fnv1a64:" + hex64(fnv1a64(f.content)) + " bytes:" + std::to_string(f.content.size()) + "\n";
    }
    files.push_back({"manifest.txt", m});
    return files;
}

/// Writes into a sibling staging directory and renames it into place, so `out_dir`
/// either holds a complete batch or is untouched.
inline void write_outputs(const BatchResult& b, const std::filesystem::path& out_dir, bool with_trace)
{
    namespace fs = std::filesystem;
    const auto files = render_outputs(b, with_trace);
    const fs::path target = fs::absolute(out_dir);
    if (target.has_parent_path())
    {
        fs::create_directories(target.parent_path());
    }
    const std::string tag = hex64(fnv1a64(target.string()) ^ static_cast<std::uint64_t>(
                                                                 std::hash<std::thread::id>{}(std::this_thread::get_id())));
    const fs::path staging = target.string() + ".partial-" + tag;
    const fs::path old = target.string() + ".old-" + tag;
    fs::remove_all(staging);
    try
    {
        fs::create_directories(staging);
        for (const auto& f : files)
        {
            std::ofstream os(staging / f.name, std::ios::binary);
            os.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
            os.close();
            if (!os)
            {
                throw std::runtime_error("failed to write " + (staging / f.name).string());
            }
        }
        if (fs::exists(target))
        {
            fs::rename(target, old);
        }
        fs::rename(staging, target);
        fs::remove_all(old);
    }
    catch (...)
    {
        std::error_code ec;
        fs::remove_all(staging, ec);
        if (!fs::exists(target, ec) && fs::exists(old, ec))
        {
            fs::rename(old, target, ec);
        }
        throw;
    }
}

} // namespace nrps

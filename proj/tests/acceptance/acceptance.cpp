#include "nrps/paging.hpp"
#include "nrps/presets.hpp"
#include "nrps/runner.hpp"
#include "nrps/sdt_uplink.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace nrps;

namespace
{

unsigned jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

struct Check
{
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

struct Fig7
{
    BatchResult instant, fixed, dynamic, skipping;
};

const Fig7& fig7()
{
    static const Fig7 f{run_batch(preset("fig7-instant"), jobs()), run_batch(preset("fig7-fixed"), jobs()),
                        run_batch(preset("fig7-dynamic"), jobs()), run_batch(preset("fig7-skipping"), jobs())};
    return f;
}

struct Fig9
{
    BatchResult none, common, group, rs;
};

const Fig9& fig9()
{
    static const Fig9 f{run_batch(preset("fig9-drx-ssb"), jobs()), run_batch(preset("fig9-epi-common"), jobs()),
                        run_batch(preset("fig9-epi-group"), jobs()), run_batch(preset("fig9-epi-group-rs"), jobs())};
    return f;
}

double exceed(const std::vector<double>& sorted, double x)
{
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

Check c1_latency_ordering()
{
    const auto& f = fig7();
    Check c;
    const double i = f.instant.outage.outage_value;
    const double x = f.fixed.outage.outage_value;
    const double d = f.dynamic.outage.outage_value;
    const double s = f.skipping.outage.outage_value;
    c.detail << "outage@1e-3 instant=" << fmt(i) << " fixed=" << fmt(x) << " dynamic=" << fmt(d) << " skipping=" << fmt(s)
             << " ms, samples=" << f.instant.merged.size();
    c.expect(i < x && x < d && d < s, "instant < fixed < dynamic < skipping");
    c.expect(i <= 1.0, "instant <= 1 ms");
    for (const auto* b : {&f.instant, &f.fixed, &f.dynamic, &f.skipping})
    {
        c.expect(b->merged.size() >= 100000, "at least 1e5 samples per curve");
        c.expect(!b->outage.low_confidence, "confident outage estimate");
    }
    return c;
}

Check c2_dynamic_ratio()
{
    const auto& f = fig7();
    Check c;
    const double ratio = f.dynamic.outage.outage_value / f.instant.outage.outage_value;
    c.detail << "dynamic/instant=" << fmt(ratio) << " (target 2.8 +- 1.0)";
    c.expect(std::abs(ratio - 2.8) <= 1.0, "ratio within band");
    return c;
}

Check c3_uplink_medians()
{
    Check c;
    const auto rrc = run_batch(preset("fig8-rrc"), jobs()).values();
    const auto ded = run_batch(preset("fig8-cg-dedicated"), jobs()).values();
    const auto rach = run_batch(preset("fig8-rach-sdt"), jobs()).values();
    const auto c10 = run_batch(preset("fig8-cg-contended-10ue"), jobs()).values();
    const double m_rrc = median(rrc);
    const double m_ded = median(ded);
    const double m_rach = median(rach);
    const double m_c10 = median(c10);
    c.detail << "median rrc=" << fmt(m_rrc) << " cg-dedicated=" << fmt(m_ded) << " rach-sdt=" << fmt(m_rach)
             << " cg-contended-10ue=" << fmt(m_c10) << " ms";
    c.expect(m_ded <= m_rach && m_rach < m_rrc, "cg-dedicated <= rach-sdt < rrc");
    c.expect(m_c10 >= 0.7 * m_rrc, "contended-10ue >= 0.7 x rrc");
    return c;
}

Check c4_paging_ccdf()
{
    const auto& f = fig9();
    Check c;
    const auto a = f.none.values();
    const auto b = f.common.values();
    const auto g = f.group.values();
    const auto r = f.rs.values();
    bool paired = a.size() == b.size() && b.size() == g.size() && g.size() == r.size();
    for (std::size_t i = 0; paired && i < a.size(); ++i)
    {
        paired = r[i] <= g[i] + 1e-9 && g[i] <= b[i] + 1e-9 && b[i] <= a[i] + 1e-9;
    }
    c.expect(paired, "per-episode group-rs <= group <= common <= drx-ssb");
    auto sa = a, sb = b, sg = g, sr = r;
    for (auto* v : {&sa, &sb, &sg, &sr})
    {
        std::sort(v->begin(), v->end());
    }
    bool grid = true;
    for (double x = 0.0; x <= 60.0; x += 0.25)
    {
        grid = grid && exceed(sr, x) <= exceed(sg, x) && exceed(sg, x) <= exceed(sb, x) && exceed(sb, x) <= exceed(sa, x);
    }
    c.expect(grid, "CCDF ordering on a 0.25 ms grid");
    const double ratio = mean_finite(g) / mean_finite(b);
    const double tail = outage_latency(a, 1e-2).outage_value;
    c.detail << "episodes=" << a.size() << " mean group/common=" << fmt(ratio) << " drx-ssb tail@1e-2=" << fmt(tail) << " ms";
    c.expect(std::abs(ratio - 0.5) <= 0.15, "group/common mean ratio 0.5 +- 0.15");
    c.expect(std::abs(tail - 23.0) <= 0.3 * 23.0, "drx-ssb tail 23 ms +- 30%");
    return c;
}

double brute_force_collision(int n, int pool)
{
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    long total = 0;
    long collided = 0;
    for (;;)
    {
        std::vector<PreambleAttempt> occ;
        for (int i = 0; i < n; ++i)
        {
            occ.push_back(PreambleAttempt{static_cast<std::uint32_t>(i), pick[static_cast<std::size_t>(i)]});
        }
        ++total;
        collided += cg_attempt_resolution(occ)[0] == Resolution::Collision;
        int k = 0;
        while (k < n && ++pick[static_cast<std::size_t>(k)] == pool)
        {
            pick[static_cast<std::size_t>(k++)] = 0;
        }
        if (k == n)
        {
            break;
        }
    }
    return static_cast<double>(collided) / static_cast<double>(total);
}

Check c5_collision_oracle()
{
    Check c;
    const int occasions = 200000;
    RngStream rng(2024, static_cast<std::uint64_t>(Stream::Preamble));
    for (const auto& [n, pool] : std::vector<std::pair<int, int>>{{2, 4}, {5, 16}, {10, 64}})
    {
        std::size_t attempts = 0;
        std::size_t collisions = 0;
        for (int o = 0; o < occasions; ++o)
        {
            std::vector<PreambleAttempt> occ;
            for (int u = 0; u < n; ++u)
            {
                occ.push_back(PreambleAttempt{static_cast<std::uint32_t>(u), static_cast<std::int32_t>(rng.uniform_int(0, pool - 1))});
            }
            for (auto res : cg_attempt_resolution(occ))
            {
                ++attempts;
                collisions += res == Resolution::Collision;
            }
        }
        const double p = collision_probability(n, pool);
        const double est = static_cast<double>(collisions) / static_cast<double>(attempts);
        // occasion-level bound: attempts in one occasion are correlated
        const double sigma = std::sqrt(p * (1.0 - p) * static_cast<double>(n) / static_cast<double>(attempts));
        c.detail << "(" << n << "," << pool << ") mc=" << fmt(est) << " exact=" << fmt(p) << " ";
        c.expect(std::abs(est - p) <= 3.0 * sigma, "Monte-Carlo within 3 sigma");
    }
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n)
    {
        for (int pool = 1; pool <= 4; ++pool)
        {
            worst = std::max(worst, std::abs(brute_force_collision(n, pool) - collision_probability(n, pool)));
        }
    }
    c.detail << "brute-force max err=" << worst;
    c.expect(worst < 1e-12, "brute force n,P <= 4");
    return c;
}

Check c6_harq_residual()
{
    Check c;
    const std::size_t packets = 1000000;
    struct Case
    {
        double first, mult;
        std::int32_t attempts;
        SinrClass cls;
    };
    RngStream rng(77, static_cast<std::uint64_t>(Stream::Link));
    for (const Case k : {Case{0.5, 0.5, 4, SinrClass::High}, Case{0.1, 0.5, 2, SinrClass::High}, Case{0.05, 0.6, 3, SinrClass::Low}})
    {
        LinkConfig cfg;
        cfg.first_tx_bler_target = k.first;
        cfg.retx_bler_multiplier = k.mult;
        cfg.max_harq_attempts = k.attempts;
        const SinrProfile profile{0, 0.0, k.cls};
        std::size_t lost = 0;
        for (std::size_t i = 0; i < packets; ++i)
        {
            std::int32_t attempt = 1;
            TxOutcome o;
            while ((o = transmission_outcome(rng, profile, attempt, cfg)) == TxOutcome::Nack)
            {
                ++attempt;
            }
            lost += o == TxOutcome::Lost;
        }
        const double p = residual_loss(profile, k.attempts, cfg);
        const double est = static_cast<double>(lost) / static_cast<double>(packets);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(packets));
        c.detail << "loss mc=" << fmt(est) << " exact=" << fmt(p) << " ";
        c.expect(std::abs(est - p) <= 3.0 * sigma, "residual loss within 3 sigma");
    }
    return c;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ledger_matches_trace(const ScenarioConfig& cfg)
{
    const auto b = run_batch(cfg, jobs());
    std::map<std::pair<std::uint64_t, std::string>, std::int64_t> ticks;
    std::istringstream trace(trace_csv(b));
    std::string line;
    std::getline(trace, line);
    while (std::getline(trace, line))
    {
        std::istringstream ls(line);
        std::string rep, ue, start, end, state;
        std::getline(ls, rep, ',');
        std::getline(ls, ue, ',');
        std::getline(ls, start, ',');
        std::getline(ls, end, ',');
        std::getline(ls, state, ',');
        ticks[{std::stoull(ue), state}] += std::stoll(end) - std::stoll(start);
    }
    std::istringstream energy(energy_csv(b));
    std::getline(energy, line);
    while (std::getline(energy, line))
    {
        std::istringstream ls(line);
        std::string ue, state, dur, units;
        std::getline(ls, ue, ',');
        std::getline(ls, state, ',');
        std::getline(ls, dur, ',');
        std::getline(ls, units, ',');
        const std::int64_t t = ticks[{std::stoull(ue), state}];
        PowerState st{};
        if (!parse_power_state(state, st) || std::abs(std::stod(dur) - symbols_to_ms(t)) > 1e-9 ||
            std::abs(std::stod(units) - static_cast<double>(t) * cfg.energy.power(st) / 28.0) > 1e-6 * (1.0 + std::stod(units)))
        {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<std::uint32_t>> all_assignments(std::uint32_t n, std::int32_t g)
{
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> cur(n, 0);
    for (;;)
    {
        out.push_back(cur);
        std::uint32_t k = 0;
        while (k < n && ++cur[k] == static_cast<std::uint32_t>(g))
        {
            cur[k++] = 0;
        }
        if (k == n)
        {
            return out;
        }
    }
}

Check c7_invariants()
{
    Check c;
    std::size_t checks = 0;

    auto det = preset("fig7-skipping");
    det.duration_s = 1.0;
    det.cells = 6;
    det.seeds = {1, 2, 3};
    const auto one = render_outputs(run_batch(det, 1), true);
    const auto again = render_outputs(run_batch(det, 1), true);
    const auto many = render_outputs(run_batch(det, jobs()), true);
    bool same = one.size() == many.size();
    for (std::size_t i = 0; same && i < one.size(); ++i)
    {
        same = one[i].content == again[i].content && one[i].content == many[i].content;
    }
    c.expect(same, "byte-identical outputs across runs and thread counts");
    ++checks;

    const auto dir = std::filesystem::temp_directory_path() / "nrps_acceptance_cli";
    std::filesystem::remove_all(dir);
    const std::string base = std::string(NRPS_CLI_PATH) + " run --preset fig8-cg-contended-10ue --seed-list 4,5 --duration-s 2";
    const int ra = std::system((base + " --jobs 1 --out " + (dir / "a").string() + " > /dev/null").c_str());
    const int rb = std::system((base + " --jobs 8 --out " + (dir / "b").string() + " > /dev/null").c_str());
    c.expect(ra == 0 && rb == 0 && !slurp(dir / "a" / "manifest.txt").empty() &&
                 slurp(dir / "a" / "manifest.txt") == slurp(dir / "b" / "manifest.txt"),
             "CLI manifests identical for --jobs 1 and 8");
    std::filesystem::remove_all(dir);
    ++checks;

    // run_batch rejects any replication whose conservation audit fails.
    bool conserved = true;
    for (const auto& name : preset_names())
    {
        auto cfg = preset(name);
        cfg.duration_s = std::min(cfg.duration_s, 5.0);
        cfg.cells = 4;
        cfg.link.first_tx_bler_target = 0.2;
        cfg.link.max_harq_attempts = 2;
        try
        {
            const auto b = run_batch(cfg, jobs());
            for (const auto& r : b.replications)
            {
                conserved = conserved && r.audit().pass;
            }
        }
        catch (const std::exception&)
        {
            conserved = false;
        }
        ++checks;
    }
    c.expect(conserved, "packet conservation on every preset");

    bool ledgers = true;
    for (const char* name : {"fig7-skipping", "fig8-rrc", "fig8-rach-sdt", "fig9-epi-group-rs"})
    {
        auto cfg = preset(name);
        cfg.duration_s = cfg.kind == ScenarioKind::Paging ? 20.0 : 1.0;
        cfg.cells = 3;
        cfg.drx.enabled = cfg.kind == ScenarioKind::Downlink;
        ledgers = ledgers && ledger_matches_trace(cfg);
        ++checks;
    }
    c.expect(ledgers, "energy ledger equals trace re-scan");

    c.expect(fig7().skipping.totals.grants_during_skip == 0 && fig7().skipping.totals.grants > 0, "no grant inside a skip window");
    std::uint64_t paged_skips = 0;
    for (const auto* b : {&fig9().none, &fig9().common, &fig9().group, &fig9().rs})
    {
        paged_skips += b->totals.paged_skips;
    }
    c.expect(paged_skips == 0, "paged UE never skips its PO");
    checks += 2;

    const auto v = fig7().instant.values();
    bool monotone = true;
    double prev = outage_latency(v, 1e-4).outage_value;
    for (double p = 1e-3; p < 0.99; p += 0.01)
    {
        const double cur = outage_latency(v, p).outage_value;
        monotone = monotone && cur <= prev;
        prev = cur;
    }
    auto shifted = v;
    for (auto& x : shifted)
    {
        x += 2.5;
    }
    for (double p : {1e-3, 1e-2, 0.5})
    {
        monotone = monotone && outage_latency(shifted, p).outage_value == outage_latency(v, p).outage_value + 2.5;
    }
    c.expect(monotone, "outage monotone in p and translation-equivariant");
    ++checks;

    bool exhaustive = true;
    for (std::uint32_t n = 1; n <= 6; ++n)
    {
        for (std::int32_t g = 1; g <= 3; ++g)
        {
            for (const auto& groups : all_assignments(n, g))
            {
                const PagingGroupAssignment a(std::vector<std::int32_t>(groups.begin(), groups.end()), g);
                for (std::uint32_t mask = 0; mask < (1U << n); ++mask)
                {
                    std::set<std::uint32_t> paged;
                    for (std::uint32_t u = 0; u < n; ++u)
                    {
                        if (mask & (1U << u))
                        {
                            paged.insert(u);
                        }
                    }
                    for (std::uint32_t u = 0; u < n; ++u)
                    {
                        if (g == 1)
                        {
                            exhaustive = exhaustive && epi_outcome(u, paged, a, EpiMode::Grouped) == epi_outcome(u, paged, a, EpiMode::Common);
                        }
                        if (paged.count(u))
                        {
                            exhaustive = exhaustive && epi_outcome(u, paged, a, EpiMode::Grouped) == PoDecision::MonitorPo &&
                                         epi_outcome(u, paged, a, EpiMode::Common) == PoDecision::MonitorPo;
                        }
                    }
                }
            }
        }
    }
    c.expect(exhaustive, "Grouped(1) == Common and paged UEs monitor, exhaustive n <= 6");
    ++checks;

    c.detail << checks << " invariant checks";
    return c;
}

Check c8_drx_sweep()
{
    Check c;
    double prev_latency = -1.0;
    double prev_energy = std::numeric_limits<double>::infinity();
    for (double cycle : {10.0, 40.0, 160.0, 640.0})
    {
        auto cfg = preset("fig7-instant");
        cfg.drx.enabled = true;
        cfg.drx.cycle_ms = cycle;
        cfg.cells = 6;
        const auto b = run_batch(cfg, jobs());
        const double latency = mean_finite(b.values());
        double energy = 0.0;
        std::size_t ues = 0;
        for (const auto& r : b.replications)
        {
            for (const auto& l : r.ledgers)
            {
                energy += l.total_energy();
                ++ues;
            }
        }
        energy /= static_cast<double>(ues) * cfg.duration_s;
        c.detail << "cycle " << cycle << ": mean=" << fmt(latency) << " ms energy/UE-s=" << fmt(energy) << "; ";
        c.expect(latency >= prev_latency, "mean latency non-decreasing in cycle");
        c.expect(energy <= prev_energy, "energy non-increasing in cycle");
        prev_latency = latency;
        prev_energy = energy;
    }
    return c;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"1 fig7 outage ordering", c1_latency_ordering}, {"2 dynamic/instant ratio", c2_dynamic_ratio},
        {"3 uplink medians", c3_uplink_medians},         {"4 paging CCDF", c4_paging_ccdf},
        {"5 CG collision oracle", c5_collision_oracle},  {"6 HARQ residual loss", c6_harq_residual},
        {"7 invariant suites", c7_invariants},           {"8 DRX sweep", c8_drx_sweep},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria)
    {
        Check c;
        try
        {
            c = fn();
        }
        catch (const std::exception& e)
        {
            c.pass = false;
            c.detail << "exception: " << e.what();
        }
        failed += !c.pass;
        std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << c.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

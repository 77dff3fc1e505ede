// SPDX-License-Identifier: Apache-2.0
// nrps: run, validate and list power-saving latency scenarios.

#include "nrps/presets.hpp"
#include "nrps/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace
{

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw nrps::ConfigError("config", "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    return nrps::detail::parse_u64_list("--seed-list", "[" + text + "]");
}

int fail(const std::string& key, const std::string& msg)
{
    std::fprintf(stderr, "error: %s: %s\n", key.c_str(), msg.c_str());
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"nrps - 5G NR power-saving latency simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset_name;
    std::string seed_list;
    std::string out_dir = "out";
    double duration_s = 0.0;
    bool trace = false;
    unsigned jobs = std::max(1U, std::thread::hardware_concurrency());

    auto* run = app.add_subcommand("run", "run a scenario batch");
    run->add_option("--config", config_path, "scenario file (key = value)");
    run->add_option("--preset", preset_name, "start from a named preset");
    run->add_option("--seed-list", seed_list, "comma-separated seeds, overrides the config");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--duration-s", duration_s, "simulated seconds per replication");
    run->add_flag("--trace", trace, "also write the per-UE power-state trace");
    run->add_option("--jobs", jobs, "parallel replications");

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("--config", config_path, "scenario file")->required();
    validate->add_option("--preset", preset_name, "start from a named preset");

    auto* presets = app.add_subcommand("presets", "list preset names");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        return fail("cli", e.what());
    }

    try
    {
        if (presets->parsed())
        {
            for (const auto& n : nrps::preset_names())
            {
                std::cout << n << '\n';
            }
            return 0;
        }
        if (config_path.empty() && preset_name.empty())
        {
            return fail("config", "either --config or --preset is required");
        }
        const std::string text = config_path.empty() ? std::string{} : read_file(config_path);
        nrps::ScenarioConfig cfg = nrps::load_config(text, preset_name);
        if (validate->parsed())
        {
            std::cout << "ok: " << cfg.scenario << '\n';
            return 0;
        }
        if (!seed_list.empty())
        {
            cfg.seeds = parse_seed_list(seed_list);
        }
        if (run->count("--duration-s"))
        {
            cfg.duration_s = duration_s;
        }
        cfg.validate();
        const nrps::BatchResult batch = nrps::run_batch(cfg, jobs);
        nrps::write_outputs(batch, out_dir, trace);
        const auto& o = batch.outage;
        std::cout << cfg.scenario << ": samples=" << o.sample_count << " outage(p=" << o.outage_probability
                  << ")=" << o.outage_value << " ms" << (o.low_confidence ? " [low confidence]" : "")
                  << " median=" << nrps::median(batch.values()) << " ms -> " << out_dir << '\n';
        return 0;
    }
    catch (const nrps::ConfigError& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception& e)
    {
        return fail("run", e.what());
    }
}

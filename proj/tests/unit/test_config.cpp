#include "nrps/presets.hpp"

#include <gtest/gtest.h>

using namespace nrps;

TEST(Config, EchoRoundTripsForEveryPreset)
{
    for (const auto& name : preset_names())
    {
        const ScenarioConfig a = preset(name);
        ASSERT_NO_THROW(a.validate()) << name;
        const std::string echo = config_echo(a);
        const ScenarioConfig b = load_config(echo);
        EXPECT_EQ(config_echo(b), echo) << name;
    }
}

TEST(Config, EchoListsEveryField)
{
    const std::string echo = config_echo(ScenarioConfig{});
    for (const auto& f : config_fields())
    {
        EXPECT_NE(echo.find(f.key + " = "), std::string::npos) << f.key;
    }
}

TEST(Config, OverridesApplyOnTopOfThePreset)
{
    const auto cfg = load_config("scenario = \"fig7-dynamic\"\nsched.k_max_symbols = 28 # tighter\ncells = 2\n");
    EXPECT_EQ(cfg.sched.policy, "dynamic");
    EXPECT_EQ(cfg.sched.k_max_symbols, 28);
    EXPECT_EQ(cfg.cells, 2);
    EXPECT_EQ(cfg.link.harq_rtt_symbols, 12);
}

TEST(Config, ExplicitPresetWinsOverFileScenario)
{
    const auto cfg = load_config("scenario = \"fig7-dynamic\"\n", "fig9-epi-group");
    EXPECT_EQ(cfg.kind, ScenarioKind::Paging);
    EXPECT_EQ(cfg.scenario, "fig9-epi-group");
}

TEST(Config, RejectsMalformedInput)
{
    EXPECT_THROW(load_config("bogus.key = 1\n"), ConfigError);
    EXPECT_THROW(load_config("cells = 2\ncells = 3\n"), ConfigError);
    EXPECT_THROW(load_config("cells = two\n"), ConfigError);
    EXPECT_THROW(load_config("cells\n"), ConfigError);
    EXPECT_THROW(load_config("drx.enabled = yes\n"), ConfigError);
    EXPECT_THROW(load_config("sched.policy = instant\n"), ConfigError);
    EXPECT_THROW(load_config("paging.epi_mode = \"sometimes\"\n"), ConfigError);
    EXPECT_THROW(load_config("scenario = \"fig10\"\n"), ConfigError);
    EXPECT_THROW(load_config("seeds = 1, 2\n"), ConfigError);
}

TEST(Config, ErrorsNameTheOffendingKey)
{
    try
    {
        load_config("link.max_harq_attempts = 0\n");
        FAIL();
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(e.key(), "link.max_harq_attempts");
    }
    try
    {
        load_config("kind = \"uplink\"\nuplink.mode = \"cg\"\nuplink.dedicated = true\nuplink.preamble_pool = 4\n"
                    "rrc.initial_state = \"inactive\"\n");
        FAIL();
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(e.key(), "uplink.dedicated");
    }
}

TEST(Config, SdtRequiresInactiveStart)
{
    EXPECT_THROW(load_config("kind = \"uplink\"\nuplink.mode = \"cg\"\nrrc.initial_state = \"idle\"\n"), ConfigError);
}

TEST(Config, SeedsAndCommentsParse)
{
    const auto cfg = load_config("# header\nseeds = [3, 5,8]\nmeta.antennas = \"4x4 # not a comment\"\n");
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 5, 8}));
    EXPECT_EQ(cfg.meta.antennas, "4x4 # not a comment");
}

TEST(Presets, MatchTheirCurves)
{
    EXPECT_TRUE(std::holds_alternative<PdcchSkipping>(preset("fig7-skipping").scheduling_policy()));
    EXPECT_EQ(std::get<PdcchSkipping>(preset("fig7-skipping").scheduling_policy()).skip_slots, 5);
    EXPECT_EQ(preset("fig8-cg-contended-10ue").ues_per_cell, 10);
    EXPECT_EQ(preset("fig8-cg-contended-10ue").uplink.preamble_pool, 4);
    EXPECT_EQ(preset("fig8-cg-contended-5ue").ues_per_cell, 5);
    const auto rs = preset("fig9-epi-group-rs");
    EXPECT_EQ(rs.paging.epi_mode, EpiMode::Grouped);
    EXPECT_EQ(rs.paging.num_groups, 8);
    EXPECT_TRUE(rs.paging.idle_rs);
    EXPECT_EQ(preset_names().size(), 13U);
    EXPECT_THROW(preset("fig7-nothing"), ConfigError);
}

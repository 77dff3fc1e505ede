#include "nrps/rrc_drx_energy.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace nrps;

TEST(Rrc, LegalEdgesAndDelays)
{
    RrcConfig cfg;
    RrcMachine m(RrcState::Connected);
    EXPECT_EQ(m.transition(RrcEdge::Suspend, cfg).ticks, 0);
    EXPECT_EQ(m.state(), RrcState::Inactive);
    EXPECT_TRUE(m.has_anchor_context());
    EXPECT_EQ(m.connect(cfg).ticks, 5 * 28);
    EXPECT_EQ(m.resumes(), 1U);
    m.transition(RrcEdge::Suspend, cfg);
    m.transition(RrcEdge::Release, cfg);
    EXPECT_FALSE(m.has_anchor_context());
    EXPECT_EQ(m.connect(cfg).ticks, 20 * 28);
    EXPECT_EQ(m.setups(), 1U);
}

TEST(Rrc, IllegalEdgesThrow)
{
    RrcConfig cfg;
    RrcMachine m(RrcState::Idle);
    EXPECT_THROW(m.transition(RrcEdge::Resume, cfg), std::logic_error);
    EXPECT_THROW(m.transition(RrcEdge::Suspend, cfg), std::logic_error);
    RrcMachine c(RrcState::Connected);
    EXPECT_THROW(c.transition(RrcEdge::Setup, cfg), std::logic_error);
}

TEST(Rrc, ResumeMustBeCheaperThanSetup)
{
    RrcConfig cfg;
    cfg.resume_ms = 30.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Drx, CycleBoundsPerKind)
{
    DrxConfig cfg;
    cfg.enabled = true;
    cfg.kind = DrxKind::Long;
    cfg.cycle_ms = 5.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.kind = DrxKind::Short;
    EXPECT_NO_THROW(cfg.validate());
    cfg.cycle_ms = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = DrxConfig{};
    cfg.enabled = true;
    cfg.on_duration_ms = 50.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Drx, OnDurationsAndInactivityWindow)
{
    DrxConfig cfg;
    cfg.enabled = true;
    cfg.cycle_ms = 10.0;
    cfg.on_duration_ms = 2.0;
    cfg.inactivity_timer_ms = 8.0;
    DrxTracker d(cfg, 28); // phase 1 ms
    EXPECT_FALSE(d.reachable(SimTime{0}));
    EXPECT_TRUE(d.reachable(SimTime{28}));
    EXPECT_TRUE(d.reachable(SimTime{28 + 55}));
    EXPECT_FALSE(d.reachable(SimTime{28 + 56}));
    EXPECT_EQ(d.next_reachable(SimTime{100}).ticks, 28 + 280);
    d.on_grant(SimTime{40});
    EXPECT_TRUE(d.reachable(SimTime{100}));
    EXPECT_FALSE(d.reachable(SimTime{40 + 224}));
    d.on_grant(SimTime{200});
    ASSERT_EQ(d.inactivity_spans().size(), 1U);
    EXPECT_EQ(d.inactivity_spans()[0].second.ticks, 200 + 224);
}

TEST(Drx, DisabledIsAlwaysReachable)
{
    DrxTracker d(DrxConfig{}, 0);
    EXPECT_TRUE(d.reachable(SimTime{12345}));
}

TEST(SleepStates, DeepestFeasibleStateIsChosenStrictly)
{
    EnergyModel m;
    EXPECT_EQ(m.select_sleep_state_ms(25.0), PowerState::DeepSleep);
    EXPECT_EQ(m.select_sleep_state_ms(20.0), PowerState::LightSleep);
    EXPECT_EQ(m.select_sleep_state_ms(6.5), PowerState::LightSleep);
    EXPECT_EQ(m.select_sleep_state_ms(6.0), PowerState::MicroSleep);
    EXPECT_EQ(m.select_sleep_state_ms(1.0), PowerState::ActiveMonitor);
    EXPECT_EQ(m.select_sleep_state(SimTime{561}), PowerState::DeepSleep);
    EXPECT_EQ(m.select_sleep_state(SimTime{560}), PowerState::LightSleep);
}

TEST(SleepStates, PowerOrderingIsValidated)
{
    EnergyModel m;
    m.light_power = 0.5;
    EXPECT_THROW(m.validate(), ConfigError);
}

TEST(PowerStateNames, RoundTrip)
{
    for (std::size_t i = 0; i < kPowerStateCount; ++i)
    {
        PowerState out{};
        ASSERT_TRUE(parse_power_state(to_string(static_cast<PowerState>(i)), out));
        EXPECT_EQ(out, static_cast<PowerState>(i));
    }
    PowerState out{};
    EXPECT_FALSE(parse_power_state("bogus", out));
}

TEST(Ledger, RejectsNegativeDurations)
{
    EnergyLedger l;
    EXPECT_THROW(l.accumulate(PowerState::DeepSleep, SimTime{-1}, EnergyModel{}), std::invalid_argument);
}

TEST(Timeline, PartitionsTheHorizonExactly)
{
    EnergyModel m;
    ActivityTimeline t;
    t.add(SimTime{0}, SimTime{56}, PowerState::ActiveMonitor);
    t.add(SimTime{28}, SimTime{40}, PowerState::ActiveRx);
    t.add(SimTime{1000}, SimTime{1100}, PowerState::ActiveMonitor);
    t.add(SimTime{1150}, SimTime{1160}, PowerState::ActiveMonitor);
    const auto trace = t.finalize(SimTime{3000}, m);
    std::int64_t covered = 0;
    SimTime cursor{0};
    for (const auto& s : trace)
    {
        ASSERT_EQ(s.start, cursor);
        ASSERT_LT(s.start, s.end);
        covered += (s.end - s.start).ticks;
        cursor = s.end;
    }
    EXPECT_EQ(covered, 3000);
    // 944-tick gap -> deep sleep ending with a 560-tick ramp; 50-tick gap -> micro sleep with 28-tick ramp.
    EXPECT_EQ(trace[1].state, PowerState::ActiveRx);
    EXPECT_EQ(trace[3].state, PowerState::DeepSleep);
    EXPECT_EQ(trace[4].state, PowerState::TransitionDeep);
    EXPECT_EQ((trace[4].end - trace[4].start).ticks, 560);
    EXPECT_EQ(trace[6].state, PowerState::MicroSleep);
    EXPECT_EQ(trace[7].state, PowerState::TransitionMicro);

    const auto ledger = ledger_from_trace(0, trace, m);
    EXPECT_EQ(std::accumulate(ledger.duration_ticks.begin(), ledger.duration_ticks.end(), std::int64_t{0}), 3000);
    EXPECT_EQ(ledger.transition_count[static_cast<std::size_t>(PowerState::TransitionDeep)], 2U);
    double expect = 0.0;
    for (const auto& s : trace)
    {
        expect += static_cast<double>((s.end - s.start).ticks) * m.power(s.state);
    }
    EXPECT_DOUBLE_EQ(ledger.total_unit_ticks(), expect);
}

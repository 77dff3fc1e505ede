#include "nrps/scheduler.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace nrps;

namespace
{

std::vector<SinrProfile> flat_profiles(std::size_t n)
{
    std::vector<SinrProfile> p;
    for (std::size_t i = 0; i < n; ++i)
    {
        p.push_back(SinrProfile{static_cast<std::uint32_t>(i), 15.0, SinrClass::High});
    }
    return p;
}

std::vector<UeSchedState> backlogged(std::size_t n, std::size_t packets_each, SimTime eligible = SimTime{0})
{
    std::vector<UeSchedState> ues(n);
    std::uint64_t id = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        ues[i].ue_id = static_cast<std::uint32_t>(i);
        for (std::size_t k = 0; k < packets_each; ++k)
        {
            ues[i].dl_queue.push_back(QueuedPacket{id++, eligible});
        }
    }
    return ues;
}

} // namespace

TEST(Offsets, FixedAndInstant)
{
    RngStream r(1, Stream::Offset);
    EXPECT_EQ(data_offset(InstantScheduling{}, r).ticks, 0);
    EXPECT_EQ(data_offset(FixedOffset{14}, r).ticks, 14);
}

TEST(Offsets, DynamicIsUniformOverTheRange)
{
    RngStream r(2, Stream::Offset);
    const DynamicOffset d{14, 56};
    const int n = 430000;
    std::vector<int> counts(43, 0);
    for (int i = 0; i < n; ++i)
    {
        const auto k = data_offset(d, r).ticks;
        ASSERT_GE(k, 14);
        ASSERT_LE(k, 56);
        ++counts[k - 14];
    }
    double chi2 = 0.0;
    for (int c : counts)
    {
        const double e = n / 43.0;
        chi2 += (c - e) * (c - e) / e;
    }
    EXPECT_LT(chi2, 80.0); // 42 dof, 0.999 quantile ~ 76.1
}

TEST(Policy, ValidationRejectsBadOffsets)
{
    EXPECT_THROW(validate_policy(DynamicOffset{20, 10}), ConfigError);
    EXPECT_THROW(validate_policy(FixedOffset{-1}), ConfigError);
    EXPECT_THROW(validate_policy(PdcchSkipping{0, FixedOffset{}}), ConfigError);
    EXPECT_NO_THROW(validate_policy(PdcchSkipping{5, DynamicOffset{}}));
    EXPECT_EQ(skip_slots_of(PdcchSkipping{5, FixedOffset{}}), 5);
    EXPECT_FALSE(skip_slots_of(InstantScheduling{}).has_value());
}

TEST(Grid, OccasionsAlign)
{
    PdcchGrid g;
    EXPECT_EQ(g.next_occasion(SimTime{0}).ticks, 0);
    EXPECT_EQ(g.next_occasion(SimTime{1}).ticks, 4);
    EXPECT_TRUE(g.on_grid(SimTime{8}));
    EXPECT_FALSE(g.on_grid(SimTime{9}));
}

TEST(Scheduler, CapacityAndOneGrantPerUe)
{
    auto ues = backlogged(5, 3);
    const auto profiles = flat_profiles(5);
    RngStream r(1, Stream::Offset);
    PdcchGrid g;
    const auto grants = on_pdcch_occasion(SimTime{0}, InstantScheduling{}, g, ues, profiles, r);
    ASSERT_EQ(grants.size(), 2U);
    EXPECT_NE(grants[0].ue_id, grants[1].ue_id);
    for (const auto& gr : grants)
    {
        EXPECT_EQ(gr.data_at, gr.grant_at);
    }
}

TEST(Scheduler, ProportionalFairRotatesService)
{
    auto ues = backlogged(4, 100);
    const auto profiles = flat_profiles(4);
    RngStream r(1, Stream::Offset);
    PdcchGrid g;
    g.capacity_grants_per_occasion = 1;
    std::vector<int> served(4, 0);
    for (int k = 0; k < 200; ++k)
    {
        for (const auto& gr : on_pdcch_occasion(SimTime{4 * k}, FixedOffset{14}, g, ues, profiles, r))
        {
            ++served[gr.ue_id];
            EXPECT_EQ((gr.data_at - gr.grant_at).ticks, 14);
        }
    }
    for (int s : served)
    {
        EXPECT_NEAR(s, 50, 2);
    }
}

TEST(Scheduler, HigherSinrWinsWhenAveragesAreEqual)
{
    auto ues = backlogged(2, 1);
    auto profiles = flat_profiles(2);
    profiles[1].mean_sinr_db = 25.0;
    const auto order = pf_order(ues, profiles);
    ASSERT_EQ(order.size(), 2U);
    EXPECT_EQ(order[0], 1U);
}

TEST(Scheduler, IneligibleSkippingAndUnreachableUesAreNotGranted)
{
    auto ues = backlogged(3, 1);
    ues[0].dl_queue.front().eligible_at = SimTime{10};
    apply_skipping(ues[1], SimTime{0}, 5);
    const auto profiles = flat_profiles(3);
    RngStream r(1, Stream::Offset);
    PdcchGrid g;
    g.capacity_grants_per_occasion = 3;
    auto grants = on_pdcch_occasion(SimTime{4}, InstantScheduling{}, g, ues, profiles, r,
                                    [](std::uint32_t ue) { return ue != 2; });
    EXPECT_TRUE(grants.empty());
    grants = on_pdcch_occasion(SimTime{70}, InstantScheduling{}, g, ues, profiles, r);
    EXPECT_EQ(grants.size(), 3U);
}

TEST(Skipping, WindowLengthIsSkipSlotsTimesSlot)
{
    UeSchedState ue;
    const auto until = apply_skipping(ue, SimTime{100}, 5);
    EXPECT_EQ(until.ticks, 100 + 70);
    EXPECT_TRUE(ue.skipping(SimTime{169}));
    EXPECT_FALSE(ue.skipping(SimTime{170}));
    EXPECT_THROW(apply_skipping(ue, SimTime{0}, 0), std::invalid_argument);
}

TEST(Processing, ReceptionIsTtiPlusDecode)
{
    ProcessingDelays d;
    EXPECT_EQ(d.reception().ticks, 8);
}

#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace gmev;

TEST(Behavior, NetworksHaveExpectedCosts) {
    const auto nets = behavior_networks();
    ASSERT_EQ(nets.size(), 4u);
    EXPECT_EQ(nets[0].routes.route_costs(), (vector(2) << 2, 3).finished());
    EXPECT_EQ(nets[1].routes.route_costs(), (vector(2) << 3, 4).finished());
    EXPECT_EQ(nets[2].routes.route_costs(), (vector(2) << 3, 4).finished());
    EXPECT_EQ(nets[3].routes.route_costs(), (vector(2) << 3, 5).finished());
}

TEST(Behavior, LogitIgnoresSharedCost) {
    const auto nets = behavior_networks();
    model_spec logit;
    EXPECT_EQ(classify(nets[0].routes, nets[1].routes, logit), trend::equal);
}

TEST(Behavior, TableMatchesReferenceCells) {
    const auto cells = behavior_table();
    ASSERT_EQ(cells.size(), 9u);
    for (const auto& c : cells) EXPECT_TRUE(c.reproduces()) << c.network << " " << c.model;
    // the two recorded misses
    EXPECT_FALSE(cells[1].desired());
    EXPECT_FALSE(cells[3].desired());
    int desired = 0;
    for (const auto& c : cells) desired += c.desired();
    EXPECT_EQ(desired, 7);
}

TEST(Behavior, ReferenceModelHitsEveryDesiredTrend) {
    for (const auto& c : behavior_table())
        if (c.model == "MD-MN") EXPECT_TRUE(c.desired()) << c.network;
}

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gmev;
using testing_support::simple_network;

TEST(RouteSet, RouteCosts) {
    const auto rs = simple_network();
    EXPECT_DOUBLE_EQ(route_cost(rs, "upper"), 4.0);
    EXPECT_DOUBLE_EQ(route_cost(rs, "middle"), 5.0);
    EXPECT_DOUBLE_EQ(route_cost(rs, "lower"), 4.0);
    const route_set single({{"x", 4}}, {{"only", {"x"}}});
    EXPECT_DOUBLE_EQ(route_cost(single, "only"), 4.0);
    EXPECT_THROW(route_cost(rs, "nope"), input_error);
}

TEST(RouteSet, OverlapCosts) {
    const auto rs = simple_network();
    EXPECT_DOUBLE_EQ(overlap_cost(rs, "upper", "middle"), 3.0);
    EXPECT_DOUBLE_EQ(overlap_cost(rs, "middle", "upper"), 3.0);
    EXPECT_DOUBLE_EQ(overlap_cost(rs, "upper", "lower"), 0.0);
    EXPECT_DOUBLE_EQ(overlap_cost(rs, "middle", "middle"), 5.0);
    EXPECT_DOUBLE_EQ(rs.nonoverlap_cost(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(rs.nonoverlap_cost(1, 0), 2.0);
}

TEST(RouteSet, RejectsInvalidInput) {
    EXPECT_THROW(route_set({{"a", 1}}, {}), input_error);
    EXPECT_THROW(route_set({{"a", 0}}, {{"r", {"a"}}}), input_error);
    EXPECT_THROW(route_set({{"a", -1}}, {{"r", {"a"}}}), input_error);
    EXPECT_THROW(route_set({{"a", 1}, {"a", 2}}, {{"r", {"a"}}}), input_error);
    EXPECT_THROW(route_set({{"a", 1}}, {{"r", {"b"}}}), input_error);
    EXPECT_THROW(route_set({{"a", 1}}, {{"r", {"a", "a"}}}), input_error);
    EXPECT_THROW(route_set({{"a", 1}}, {{"r", {}}}), input_error);
    EXPECT_THROW(route_set({{"a", 1}, {"b", 1}}, {{"r", {"a", "b"}}, {"s", {"b", "a"}}}), input_error);
    EXPECT_THROW(route_set({{"a", 1}}, {{"r", {"a"}}, {"r", {"a"}}}), input_error);
}

TEST(RouteSet, ErrorNamesOffendingIds) {
    try {
        route_set({{"a", 1}}, {{"r7", {"zz"}}});
        FAIL();
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("r7"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    }
}

TEST(PathSize, SimpleNetwork) {
    const auto ps = path_size_factors(simple_network());
    EXPECT_NEAR(ps[0], 0.625, 1e-15);
    EXPECT_NEAR(ps[1], 0.7, 1e-15);
    EXPECT_EQ(ps[2], 1.0);
}

TEST(PathSize, DisjointRoutesAreOne) {
    const route_set rs({{"a", 1}, {"b", 2}, {"c", 3}}, {{"r", {"a"}}, {"s", {"b"}}, {"t", {"c"}}});
    EXPECT_TRUE((path_size_factors(rs).array() == 1.0).all());
}

TEST(PathSize, FullySharedTwoLinkRoute) {
    // r = {a, b} with both links also used by other routes -> 0.5
    const route_set rs({{"a", 1}, {"b", 1}, {"c", 1}},
                       {{"r", {"a", "b"}}, {"s", {"a", "c"}}, {"t", {"b", "c"}}});
    EXPECT_DOUBLE_EQ(path_size_factors(rs)[0], 0.5);
}

TEST(PathSize, ReferenceSpecific) {
    const auto rs = simple_network();
    const auto ps = ref_path_size_factors(rs, rs.route_index("lower"));
    EXPECT_NEAR(ps[0], 0.625, 1e-15);
    EXPECT_NEAR(ps[1], 0.7, 1e-15);
    EXPECT_EQ(ps[2], 1.0);
    // relative to upper, middle keeps only link d (used once)
    const auto pu = ref_path_size_factors(rs, rs.route_index("upper"));
    EXPECT_EQ(pu[0], 1.0);
    EXPECT_DOUBLE_EQ(pu[1], 1.0);
}

TEST(PathSize, ReferenceContainingRouteIsDegenerate) {
    const route_set rs({{"a", 1}, {"b", 1}}, {{"short", {"a"}}, {"long", {"a", "b"}}});
    EXPECT_THROW(ref_path_size_factors(rs, 1), degenerate_pair_error);
    try {
        ref_path_size_factors(rs, 1);
    } catch (const degenerate_pair_error& e) {
        EXPECT_EQ(e.first(), "short");
        EXPECT_EQ(e.second(), "long");
    }
}

TEST(Similarity, SimpleNetwork) {
    const auto phi = similarity_matrix(simple_network());
    EXPECT_NEAR(phi(0, 1), 3.0 / std::sqrt(20.0), 1e-15);
    EXPECT_EQ(phi(0, 2), 0.0);
    EXPECT_EQ(phi(1, 2), 0.0);
    EXPECT_EQ(phi, phi.transpose());
}

TEST(Similarity, NearDuplicateIsClamped) {
    const route_set rs({{"a", 1e6}, {"b", 1e-9}, {"c", 1e-9}}, {{"r", {"a", "b"}}, {"s", {"a", "c"}}});
    EXPECT_DOUBLE_EQ(similarity_matrix(rs)(0, 1), 1.0 - default_similarity_clamp);
    EXPECT_THROW(similarity_matrix(route_set({{"a", 1}}, {{"r", {"a"}}})), input_error);
}

TEST(Inclusion, ColumnsAndRows) {
    const route_set rs({{"a", 3}, {"b", 1}, {"unused", 2}, {"e", 4}}, {{"upper", {"a", "b"}}, {"lower", {"e"}}});
    const auto alpha = inclusion_matrix(rs);
    EXPECT_DOUBLE_EQ(alpha(0, 0), 0.75);
    EXPECT_DOUBLE_EQ(alpha(1, 0), 0.25);
    EXPECT_DOUBLE_EQ(alpha(3, 1), 1.0);
    EXPECT_EQ(alpha.row(2).sum(), 0.0);
}

TEST(NetworkProperties, RandomRouteSets) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rs = testing_support::random_route_set(rng, testing_support::uniform_int(rng, 2, 8));
        const auto alpha = inclusion_matrix(rs);
        const auto ps = path_size_factors(rs);
        const auto phi = similarity_matrix(rs);
        for (std::size_t r = 0; r < rs.size(); ++r) {
            const auto i = static_cast<Eigen::Index>(r);
            EXPECT_NEAR(alpha.col(i).sum(), 1.0, 1e-12);
            EXPECT_GT(ps[i], 0.0);
            EXPECT_LE(ps[i], 1.0);
            EXPECT_EQ(ps[i] == 1.0, !rs.overlaps_any(r));
            for (std::size_t s = 0; s < rs.size(); ++s) {
                const auto j = static_cast<Eigen::Index>(s);
                EXPECT_EQ(rs.overlap_cost(r, s), rs.overlap_cost(s, r));
                EXPECT_LE(rs.overlap_cost(r, s), std::min(rs.route_cost(r), rs.route_cost(s)) + 1e-12);
                if (r == s) continue;
                EXPECT_GE(phi(i, j), 0.0);
                EXPECT_LE(phi(i, j), 1.0 - default_similarity_clamp);
                EXPECT_EQ(phi(i, j) == 0.0, rs.overlap_cost(r, s) == 0.0);
            }
        }
    }
}

TEST(RouteSet, WithLinkCostsKeepsTopology) {
    const auto rs = simple_network();
    gmev::vector c(4);
    c << 1, 1, 1, 1;
    const auto rs2 = rs.with_link_costs(c);
    EXPECT_EQ(rs2.route_cost(1), 2.0);
    EXPECT_EQ(rs2.routes()[1].id, "middle");
    EXPECT_THROW(rs.with_link_costs(gmev::vector::Ones(3)), input_error);
}

#include <gtest/gtest.h>

#include <random>

#include "hmt/common/error.hpp"
#include "hmt/nav/pathfinding.hpp"
#include "oracles.hpp"

using namespace hmt;

TEST(PlanPath, StartEqualsGoal) {
    nav::NavGrid g(4, 4);
    auto p = nav::plan_path(g, {1, 1}, {1, 1});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->size(), 1u);
}

TEST(PlanPath, StraightLine) {
    nav::NavGrid g(5, 1);
    auto p = nav::plan_path(g, {0, 0}, {4, 0});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->size(), 5u);
    EXPECT_TRUE(nav::is_valid_path(g, *p, {0, 0}, {4, 0}));
}

TEST(PlanPath, WallForcesDetour) {
    nav::NavGrid g(5, 5);
    for (int y = 0; y < 4; ++y) g.set_blocked({2, y});
    auto p = nav::plan_path(g, {0, 0}, {4, 0});
    ASSERT_TRUE(p);
    EXPECT_EQ(static_cast<int>(p->size()) - 1, 12);
}

TEST(PlanPath, BlockedGoalIsUnreachable) {
    nav::NavGrid g(3, 3);
    g.set_blocked({2, 2});
    EXPECT_FALSE(nav::plan_path(g, {0, 0}, {2, 2}));
}

TEST(PlanPath, EnclosedGoalIsUnreachable) {
    nav::NavGrid g(5, 5);
    g.set_blocked({3, 4});
    g.set_blocked({4, 3});
    EXPECT_FALSE(nav::plan_path(g, {0, 0}, {4, 4}));
}

TEST(PlanPath, InvalidEndpointsThrow) {
    nav::NavGrid g(3, 3);
    g.set_blocked({0, 0});
    EXPECT_THROW(nav::plan_path(g, {0, 0}, {2, 2}), Error);
    EXPECT_THROW(nav::plan_path(g, {1, 1}, {3, 1}), Error);
    EXPECT_THROW(nav::plan_path(g, {-1, 0}, {1, 1}), Error);
}

TEST(PlanPath, Deterministic) {
    nav::NavGrid g(8, 8);
    auto a = nav::plan_path(g, {0, 0}, {7, 7});
    auto b = nav::plan_path(g, {0, 0}, {7, 7});
    ASSERT_TRUE(a && b);
    EXPECT_EQ(*a, *b);
}

TEST(PlanPath, MatchesBfsOracleOnRandomGrids) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 150; ++i) {
        auto g = oracle::random_grid(rng, 12, 12, 0.25);
        std::uniform_int_distribution<int> c(0, 11);
        Voxel s{c(rng), c(rng)}, t{c(rng), c(rng)};
        if (!g.walkable(s)) continue;
        auto path = nav::plan_path(g, s, t);
        auto oracle = oracle::bfs_distance(g, s, t);
        ASSERT_EQ(path.has_value(), oracle.has_value());
        if (path) {
            EXPECT_EQ(static_cast<int>(path->size()) - 1, *oracle);
            EXPECT_TRUE(nav::is_valid_path(g, *path, s, t));
        }
    }
}

TEST(PlanPathAdjacent, EndsNextToTarget) {
    nav::NavGrid g(5, 5);
    g.set_blocked({2, 2});
    auto p = nav::plan_path_adjacent(g, {0, 0}, {2, 2});
    ASSERT_TRUE(p);
    EXPECT_EQ(manhattan(p->back(), {2, 2}), 1);
    EXPECT_EQ(static_cast<int>(p->size()) - 1, 3);
}

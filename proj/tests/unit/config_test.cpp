#include <gtest/gtest.h>

#include "hmt/common/error.hpp"
#include "hmt/world/config.hpp"
#include "hmt/world/serialize.hpp"

using namespace hmt;
using namespace hmt::world;

TEST(Config, DefaultsValidate) {
    EXPECT_NO_THROW(validate(default_config()));
    EXPECT_NO_THROW(validate(relaxed_config()));
    EXPECT_NO_THROW(validate(long_config()));
}

TEST(Config, MiningTicksRoundUp) {
    auto c = default_config();
    EXPECT_EQ(c.mining_ticks("wood", false), 40);
    EXPECT_EQ(c.mining_ticks("stone", false), 60);
    EXPECT_EQ(c.mining_ticks("wood", true), 10);
    c.mining_duration_s["wood"] = 0.33;
    EXPECT_EQ(c.mining_ticks("wood", false), 7);  // 6.6 -> 7
}

TEST(Config, CollaborationEstimate) {
    const auto c = default_config();
    const auto e = estimate_collaboration(c);
    // 3 wood without pickaxe (2 s each) plus 30 cells of each material with one.
    const double expected = 3 * 2.0 + 30 * 0.5 + 30 * 0.75 + 30 * 0.75;
    EXPECT_DOUBLE_EQ(e.solo_mining_s, expected);
    EXPECT_TRUE(e.one_agent_fails);
    EXPECT_TRUE(e.two_agents_finish);
}

TEST(Config, RejectsBadThresholds) {
    auto c = default_config();
    c.phase_thresholds = {0.2, 0.1, 0.6, 0.8};
    EXPECT_THROW(validate(c), Error);
    c.phase_thresholds = {0.2, 0.4, 0.6};
    EXPECT_THROW(validate(c), Error);
}

TEST(Config, RejectsOverlappingFixtures) {
    auto c = default_config();
    c.chest = c.towers[0].at;
    EXPECT_THROW(validate(c), Error);
}

TEST(Config, RejectsTooGenerousTimeLimit) {
    auto c = default_config();
    c.time_limit_s = 1000;
    EXPECT_THROW(validate(c), Error);
    c.require_collaboration = false;
    EXPECT_NO_THROW(validate(c));
}

TEST(Config, TomlRoundTrip) {
    const auto c = default_config();
    const auto back = parse_config_toml(to_toml(c));
    EXPECT_EQ(back, c);
    EXPECT_EQ(config_digest(back), config_digest(c));
}

TEST(Config, TomlOverridesAndRect) {
    const auto c = parse_config_toml(R"(
name = "tiny"
[mission]
time_limit_s = 300
require_collaboration = false
[[plan.layers]]
material = "wood"
rect = [9, 8, 2, 1]
)");
    EXPECT_EQ(c.name, "tiny");
    EXPECT_EQ(c.time_limit_s, 300);
    ASSERT_EQ(c.plan.layers.size(), 1u);
    EXPECT_EQ(c.plan.layers[0].cells, (std::vector<Voxel>{{9, 8}, {10, 8}}));
}

TEST(Config, TomlRejectsUnknownKeys) {
    EXPECT_THROW(parse_config_toml("[world]\nwidht = 3\n"), Error);
    EXPECT_THROW(parse_config_toml("this is not toml ="), Error);
}

TEST(Config, JsonRoundTrip) {
    const auto c = default_config();
    EXPECT_EQ(config_from_json(to_json(c)), c);
}

TEST(Config, DigestChangesWithContent) {
    auto c = default_config();
    const auto d = config_digest(c);
    c.seed = 8;
    EXPECT_NE(config_digest(c), d);
    EXPECT_EQ(d.size(), 64u);
}

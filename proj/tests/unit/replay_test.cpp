#include <gtest/gtest.h>

#include <random>

#include "episodes.hpp"
#include "hmt/common/error.hpp"
#include "hmt/replay/render.hpp"
#include "hmt/replay/replay.hpp"
#include "hmt/world/serialize.hpp"

using namespace hmt;
using namespace hmt::replay;
using orchestrator::AiKind;

namespace {

const server::MissionArtifacts& artifacts() { return fixtures::cached_episode(AiKind::dt, 5).artifacts; }
const log::MissionTimeline& timeline() { return artifacts().timeline; }

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io_failure;
}

Rgb rgb_at(const Frame& f, int x, int y) {
    const auto* p = f.pixel(x, y);
    return {p[0], p[1], p[2]};
}

}  // namespace

TEST(Reconstruct, MatchesEveryLiveSnapshot) {
    const auto& cap = artifacts().capture;
    ASSERT_GT(cap.size(), 100u);
    for (std::size_t i = 0; i < cap.size(); ++i) {
        const auto snap = reconstruct(timeline(), cap[i].timestamp);
        ASSERT_EQ(world::serialize_state(snap.world), cap[i].state) << "t=" << cap[i].timestamp;
    }
}

TEST(Reconstruct, RejectsTimesOutsideTheMission) {
    EXPECT_EQ(error_of([] { reconstruct(timeline(), -0.5); }), Errc::t_out_of_range);
    EXPECT_EQ(error_of([] { reconstruct(timeline(), end_time(timeline()) + 1.0); }), Errc::t_out_of_range);
    EXPECT_NO_THROW(reconstruct(timeline(), end_time(timeline())));
}

TEST(Reconstruct, EndTimeIsFooterEnd) {
    ASSERT_TRUE(timeline().footer);
    EXPECT_DOUBLE_EQ(end_time(timeline()), *timeline().footer->ended_at);
}

TEST(Replayer, IncrementalSeeksMatchFullReconstruction) {
    Replayer r(timeline());
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> t_of(0.0, end_time(timeline()));
    double t = 0.0;
    for (int i = 0; i < 120; ++i) {
        // Mostly forward with occasional jumps back.
        t = (i % 10 == 9) ? t_of(rng) : std::min(end_time(timeline()), t + t_of(rng) / 40);
        const auto& inc = r.seek(t);
        const auto full = reconstruct(timeline(), t);
        ASSERT_EQ(world::serialize_state(inc.world), world::serialize_state(full.world)) << "t=" << t;
        ASSERT_EQ(inc.display, full.display) << "t=" << t;
    }
}

TEST(Replayer, DisplayInterpolatesBetweenLoggedPositions) {
    // The first two events both move the AI; halfway between them the
    // display position lies between the two logged positions.
    const auto& ev = timeline().events;
    std::vector<std::pair<double, Position>> moves;
    for (const auto& e : ev) {
        if (e.action.contains("agents") && e.action["agents"].contains("ai") && e.action["agents"]["ai"].contains("position"))
            moves.emplace_back(e.timestamp, world::position_from_json(e.action["agents"]["ai"]["position"]));
        if (moves.size() == 3) break;
    }
    ASSERT_EQ(moves.size(), 3u);
    const double mid = (moves[1].first + moves[2].first) / 2;
    const auto snap = reconstruct(timeline(), mid);
    const auto p = snap.display.at("ai").position;
    EXPECT_NEAR(p.x, (moves[1].second.x + moves[2].second.x) / 2, 1e-9);
    EXPECT_NEAR(p.y, (moves[1].second.y + moves[2].second.y) / 2, 1e-9);
    // The exact state still holds the last logged position.
    EXPECT_EQ(snap.world.find_agent("ai")->position, moves[1].second);
}

TEST(Markers, OneMarkerPerEventSortedByTime) {
    const auto all = extract_markers(timeline(), all_marker_kinds());
    ASSERT_FALSE(all.empty());
    for (std::size_t i = 1; i < all.size(); ++i) {
        ASSERT_LE(all[i - 1].timestamp, all[i].timestamp);
        if (all[i - 1].timestamp == all[i].timestamp) {
            // Same timestamp is allowed only for distinct events; no event
            // yields two markers, so the labels differ.
            EXPECT_NE(all[i - 1].label, all[i].label);
        }
    }
}

TEST(Markers, PhaseChangesMatchTimeline) {
    std::vector<double> expected;
    for (const auto& e : timeline().events)
        if (e.action.contains("world") && e.action["world"].contains("phase")) expected.push_back(e.timestamp);
    const auto m = extract_markers(timeline(), {MarkerKind::phase_change});
    ASSERT_EQ(m.size(), expected.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m[i].timestamp, expected[i]);
        EXPECT_EQ(m[i].kind, MarkerKind::phase_change);
    }
}

TEST(Markers, FilterReturnsOnlyRequestedKinds) {
    for (auto k : all_marker_kinds()) {
        for (const auto& m : extract_markers(timeline(), {k})) EXPECT_EQ(m.kind, k);
        EXPECT_EQ(marker_kind_from_string(to_string(k)), k);
    }
    EXPECT_FALSE(extract_markers(timeline(), {MarkerKind::decision_point}).empty());
    EXPECT_FALSE(extract_markers(timeline(), {MarkerKind::block_placed}).empty());
    EXPECT_EQ(error_of([] { marker_kind_from_string("explosion"); }), Errc::schema_invalid);
}

TEST(Render, TopdownDimensions) {
    const auto& cfg = timeline().header.config;
    const auto f = render_frame(reconstruct(timeline(), 10.0), "topdown");
    EXPECT_EQ(f.width, cfg.width * cfg.cell_px);
    EXPECT_EQ(f.height, cfg.height * cfg.cell_px);
    EXPECT_EQ(f.rgb.size(), static_cast<std::size_t>(f.width * f.height * 3));
}

TEST(Render, EgocentricDimensionsAndEdgePadding) {
    const auto& cfg = timeline().header.config;
    const int side = (2 * cfg.view_radius + 1) * cfg.cell_px;
    auto snap = reconstruct(timeline(), 0.0);
    // Put the human in the corner: most of the crop lies outside the world.
    snap.display["human"].position = {0.5, 0.5};
    snap.display["human"].heading = Heading::north;
    const auto f = render_frame(snap, "human");
    EXPECT_EQ(f.width, side);
    EXPECT_EQ(f.height, side);
    EXPECT_EQ(rgb_at(f, 0, 0), kOutOfWorld);
    EXPECT_EQ(rgb_at(f, side - 1, side - 1), rgb_at(render_topdown(snap), cfg.view_radius * cfg.cell_px, cfg.view_radius * cfg.cell_px))
        << "bottom-right of the crop is world cell (7, 7)";
}

TEST(Render, EgocentricRotatesWithHeading) {
    auto snap = reconstruct(timeline(), 0.0);
    const auto& cfg = timeline().header.config;
    const int side = (2 * cfg.view_radius + 1) * cfg.cell_px;
    snap.display["human"].position = {0.5, 10.5};
    snap.display["human"].heading = Heading::north;
    const auto north = render_egocentric(snap, "human");
    snap.display["human"].heading = Heading::east;
    const auto east = render_egocentric(snap, "human");
    // West of the agent is outside the world: on the left when facing north,
    // below the agent when facing east.
    EXPECT_EQ(rgb_at(north, 2, side / 2), kOutOfWorld);
    EXPECT_NE(rgb_at(north, side - 3, side / 2), kOutOfWorld);
    EXPECT_EQ(rgb_at(east, side / 2, side - 3), kOutOfWorld);
    EXPECT_NE(rgb_at(east, side / 2, 2), kOutOfWorld);
}

TEST(Render, UnknownViewpointRejected) {
    EXPECT_EQ(error_of([] { render_frame(reconstruct(timeline(), 1.0), "satellite"); }), Errc::unknown_viewpoint);
}

TEST(Render, DeterministicPng) {
    const auto snap = reconstruct(timeline(), 42.0);
    const auto a = encode_png(render_topdown(snap));
    const auto b = encode_png(render_topdown(reconstruct(timeline(), 42.0)));
    EXPECT_EQ(a, b);
    ASSERT_GT(a.size(), 8u);
    EXPECT_EQ(a.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
}

TEST(Render, PlacedBlocksAppearInTopdown) {
    const auto end = reconstruct(timeline(), end_time(timeline()));
    const auto& cfg = timeline().header.config;
    const auto f = render_topdown(end);
    const Voxel cell = cfg.plan.layers[0].cells[0];
    EXPECT_EQ(rgb_at(f, cell.x * cfg.cell_px + 1, cell.y * cfg.cell_px + 1), block_color(end.world.at(cell)));
}

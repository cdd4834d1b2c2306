#include <gtest/gtest.h>

#include <random>

#include "hmt/common/error.hpp"
#include "hmt/protocol/codec.hpp"
#include "hmt/world/world.hpp"
#include "oracles.hpp"

using namespace hmt;
using namespace hmt::protocol;

namespace {

Errc decode_error(std::string_view frame) {
    try {
        decode(frame);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io_failure;
}

std::string frame_of(const std::string& body) {
    std::string f(4, '\0');
    const auto n = static_cast<std::uint32_t>(body.size());
    f[0] = char(n >> 24), f[1] = char(n >> 16), f[2] = char(n >> 8), f[3] = char(n);
    return f + body;
}

}  // namespace

TEST(Codec, RoundTripFuzz) {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 500; ++i) {
        const auto e = oracle::random_envelope(rng);
        ASSERT_EQ(decode(encode(e)), e) << encode_body(e);
    }
}

TEST(Codec, LengthPrefixIsBigEndian) {
    Envelope e{7, 1.5, ClientMessage{Disconnect{}}};
    const auto f = encode(e);
    const auto body = encode_body(e);
    ASSERT_EQ(f.size(), body.size() + 4);
    EXPECT_EQ(static_cast<unsigned char>(f[3]), body.size());
    EXPECT_EQ(f[0], 0);
}

TEST(Codec, EnvelopeShape) {
    Envelope e{3, 0.25, ClientMessage{ActionMsg{world::MoveTo{{2, 5}}}}};
    auto j = nlohmann::json::parse(encode_body(e));
    EXPECT_EQ(j["v"], 1);
    EXPECT_EQ(j["origin"], "client");
    EXPECT_EQ(j["payload"]["type"], "action");
    EXPECT_EQ(j["payload"]["action"]["kind"], "move_to");
}

TEST(Codec, RejectsMalformed) {
    EXPECT_EQ(decode_error("ab"), Errc::malformed_frame);
    EXPECT_EQ(decode_error(frame_of("{not json")), Errc::malformed_frame);
    EXPECT_EQ(decode_error(frame_of("[1,2]")), Errc::malformed_frame);
    EXPECT_EQ(decode_error(frame_of(R"({"v":1,"seq":1,"sim_time":0,"origin":"client"})")), Errc::malformed_frame);
    auto f = frame_of(R"({"v":1})");
    f[3] = char(f[3] + 1);
    EXPECT_EQ(decode_error(f), Errc::malformed_frame);
}

TEST(Codec, RejectsUnknownVariant) {
    EXPECT_EQ(decode_error(frame_of(R"({"v":1,"seq":1,"sim_time":0,"origin":"client","payload":{"type":"dance"}})")),
              Errc::unknown_variant);
    EXPECT_EQ(decode_error(frame_of(
                  R"({"v":1,"seq":1,"sim_time":0,"origin":"client","payload":{"type":"action","action":{"kind":"fly"}}})")),
              Errc::unknown_variant);
}

TEST(Codec, RejectsOtherSchemaVersion) {
    EXPECT_EQ(decode_error(frame_of(R"({"v":2,"seq":1,"sim_time":0,"origin":"client","payload":{"type":"disconnect"}})")),
              Errc::schema_version_mismatch);
}

TEST(Codec, FrameReaderSplitsStream) {
    std::mt19937_64 rng(5);
    std::string stream;
    std::vector<Envelope> sent;
    for (int i = 0; i < 20; ++i) {
        sent.push_back(oracle::random_envelope(rng));
        stream += encode(sent.back());
    }
    FrameReader reader;
    std::vector<Envelope> got;
    for (size_t i = 0; i < stream.size(); i += 7) {
        reader.feed(std::string_view(stream).substr(i, 7));
        while (auto f = reader.next()) got.push_back(decode(*f));
    }
    EXPECT_EQ(got, sent);
    EXPECT_EQ(reader.buffered(), 0u);
}

TEST(Messages, MissionGate) {
    using world::AgentKind;
    EXPECT_FALSE(mission_start_gate({}));
    EXPECT_FALSE(mission_start_gate({AgentKind::human, AgentKind::human}));
    EXPECT_FALSE(mission_start_gate({AgentKind::ai}));
    EXPECT_TRUE(mission_start_gate({AgentKind::ai, AgentKind::human}));
}

TEST(Messages, StateUpdateFromWorld) {
    auto w = world::init_world(world::default_config());
    world::join_agent(w, "h", world::AgentKind::human, true, center_of({10, 18}));
    const auto u = make_state_update(w);
    ASSERT_EQ(u.agents.size(), 1u);
    EXPECT_EQ(u.world.phase, 1);
    ASSERT_EQ(u.world.layers.size(), 3u);
    EXPECT_EQ(u.world.layers[0].total, 30);
    EXPECT_EQ(u.world.towers[0].remaining, 45);
    EXPECT_EQ(state_update_from_json(to_json(u)), u);
}

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>

#include "hmt/common/error.hpp"
#include "hmt/log/timeline.hpp"
#include "hmt/protocol/codec.hpp"
#include "hmt/server/game_server.hpp"

using namespace hmt;
using namespace hmt::protocol;

namespace {

// In-memory client: records every decoded server message.
struct FakeClient {
    server::GameServer& server;
    server::ConnId id = 0;
    std::vector<ServerMessage> inbox;
    bool closed = false;
    std::int64_t seq = 0;

    explicit FakeClient(server::GameServer& s) : server(s) {
        id = server.connect({[this](const std::string& body) {
                                 inbox.push_back(std::get<ServerMessage>(decode_body(body).payload));
                             },
                             [this] { closed = true; }});
    }
    void send(ClientMessage m) { server.receive(id, encode_body(Envelope{++seq, 0.0, std::move(m)})); }
    void join(const std::string& name, world::AgentKind kind) { send(Join{name, kind, std::nullopt}); }

    template <class T>
    std::vector<T> all() const {
        std::vector<T> out;
        for (const auto& m : inbox)
            if (const auto* t = std::get_if<T>(&m)) out.push_back(*t);
        return out;
    }
    std::vector<std::string> error_codes() const {
        std::vector<std::string> out;
        for (const auto& e : all<ErrorNotice>()) out.push_back(e.code);
        return out;
    }
};

world::MissionConfig short_config(double limit) {
    auto c = world::default_config();
    c.time_limit_s = limit;
    c.require_collaboration = false;
    return c;
}

void tick(server::GameServer& s, int n) {
    for (int i = 0; i < n && !s.finished(); ++i) s.tick();
}

}  // namespace

TEST(Session, NothingStartsOrLogsUntilBothKindsJoin) {
    server::GameServer s(short_config(5.0), {});
    FakeClient human(s);
    human.join("human", world::AgentKind::human);
    tick(s, 50);
    EXPECT_FALSE(s.started());
    EXPECT_FALSE(s.mission_log().is_open());
    EXPECT_EQ(human.all<Joined>().size(), 1u);
    EXPECT_TRUE(human.all<StateUpdate>().empty());

    human.send(ActionMsg{world::Idle{}});
    tick(s, 1);
    EXPECT_EQ(human.error_codes(), std::vector<std::string>{"mission_not_started"});

    FakeClient ai(s);
    ai.join("ai", world::AgentKind::ai);
    tick(s, 1);
    EXPECT_TRUE(s.started());
    EXPECT_TRUE(s.mission_log().is_open());
    EXPECT_DOUBLE_EQ(s.world().clock, 0.0);
    ASSERT_EQ(ai.all<StateUpdate>().size(), 1u);
    EXPECT_EQ(ai.all<StateUpdate>()[0].agents.size(), 2u);
}

TEST(Session, JoinedCarriesWorldInfo) {
    const auto cfg = short_config(5.0);
    server::GameServer s(cfg, {});
    FakeClient ai(s);
    ai.join("ai", world::AgentKind::ai);
    tick(s, 1);
    const auto joined = ai.all<Joined>();
    ASSERT_EQ(joined.size(), 1u);
    ASSERT_TRUE(joined[0].world_info);
    EXPECT_EQ(*joined[0].world_info, make_world_info(cfg));
}

TEST(Session, DuplicateIdIsRejected) {
    server::GameServer s(short_config(5.0), {});
    FakeClient a(s), b(s);
    a.join("human", world::AgentKind::human);
    b.join("human", world::AgentKind::human);
    tick(s, 1);
    EXPECT_EQ(b.error_codes(), std::vector<std::string>{"join_rejected"});
    EXPECT_TRUE(b.closed);
    EXPECT_FALSE(a.closed);
}

TEST(Session, FirstMessageMustBeJoin) {
    server::GameServer s(short_config(5.0), {});
    FakeClient c(s);
    c.send(ChatSend{"hello"});
    tick(s, 1);
    EXPECT_EQ(c.error_codes(), std::vector<std::string>{"protocol_violation"});
    EXPECT_TRUE(c.closed);
}

TEST(Session, MalformedBodyIsReportedAndConnectionSurvives) {
    server::GameServer s(short_config(5.0), {});
    FakeClient c(s);
    c.join("human", world::AgentKind::human);
    s.receive(c.id, "{not json");
    s.receive(c.id, R"({"seq": 1, "sim_time": 0, "type": "warp", "payload": {}})");
    tick(s, 1);
    const auto codes = c.error_codes();
    ASSERT_EQ(codes.size(), 2u);
    EXPECT_EQ(codes[0], "malformed_frame");
    EXPECT_FALSE(c.closed);
}

TEST(Session, AiCannotPlaceByDefault) {
    const auto cfg = short_config(5.0);
    server::GameServer s(cfg, {});
    FakeClient human(s), ai(s);
    human.join("human", world::AgentKind::human);
    ai.join("ai", world::AgentKind::ai);
    tick(s, 1);
    ai.send(ActionMsg{world::Place{cfg.plan.layers[0].cells[0], "wood"}});
    tick(s, 1);
    EXPECT_EQ(ai.error_codes(), std::vector<std::string>{"capability_denied"});
}

TEST(Session, TimeLimitEndsTheMissionWithFailure) {
    const auto dir = std::filesystem::temp_directory_path() / ("hmt_server_test_missions_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    server::ServerOptions opts;
    opts.mission_id = "short";
    opts.missions_dir = dir;
    opts.context_doc = "# Context\n";
    server::GameServer s(short_config(2.0), opts);
    FakeClient human(s), ai(s);
    human.join("human", world::AgentKind::human);
    ai.join("ai", world::AgentKind::ai);
    tick(s, 1000);
    ASSERT_TRUE(s.finished());
    const auto& out = s.artifacts().outcome;
    EXPECT_EQ(out.status, world::MissionOutcome::Status::failure);
    ASSERT_TRUE(out.ended_at);
    EXPECT_DOUBLE_EQ(*out.ended_at, 2.0);
    EXPECT_EQ(s.world().tick, 40);
    ASSERT_EQ(human.all<MissionEnd>().size(), 1u);
    EXPECT_EQ(human.all<MissionEnd>()[0].outcome, out);
    EXPECT_TRUE(human.closed && ai.closed);

    for (const char* f : {"timeline.json", "capture.bin", "context.md"})
        EXPECT_TRUE(std::filesystem::exists(dir / "short" / f)) << f;
    EXPECT_EQ(log::load_timeline(dir / "short" / "timeline.json"), s.artifacts().timeline);
    std::filesystem::remove_all(dir);
}

TEST(Session, DisconnectLeavesAgentStoppedAndMissionRunning) {
    const auto cfg = short_config(3.0);
    server::GameServer s(cfg, {});
    FakeClient human(s), ai(s);
    human.join("human", world::AgentKind::human);
    ai.join("ai", world::AgentKind::ai);
    tick(s, 1);
    ai.send(ActionMsg{world::MoveTo{cfg.chest}});
    tick(s, 2);
    s.disconnect(ai.id);
    tick(s, 2);
    const auto* a = s.world().find_agent("ai");
    ASSERT_NE(a, nullptr);
    EXPECT_EQ(a->action, world::ActionKind::idle);
    EXPECT_FALSE(s.finished());
    tick(s, 1000);
    EXPECT_TRUE(s.finished());
}

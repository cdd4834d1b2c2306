#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <future>
#include <thread>

#include <httplib.h>

#include "hmt/common/error.hpp"
#include "hmt/log/timeline.hpp"
#include "hmt/net/aae_http.hpp"
#include "hmt/net/agent_client.hpp"
#include "hmt/net/play_server.hpp"
#include "hmt/orchestrator/brains.hpp"
#include "hmt/orchestrator/episode.hpp"

using namespace hmt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io_failure;
}

}  // namespace

TEST(ServerUrl, ParsesDefaultsAndRejectsJunk) {
    const auto u = net::parse_server_url("ws://example.org");
    EXPECT_EQ(u.host, "example.org");
    EXPECT_EQ(u.port, "8400");
    EXPECT_EQ(u.path, "/play");
    const auto v = net::parse_server_url("ws://127.0.0.1:9001/game");
    EXPECT_EQ(v.port, "9001");
    EXPECT_EQ(v.path, "/game");
    for (const char* bad : {"http://x", "ws://", "ws://host:port", "ws://host:99999", "localhost:8400"})
        EXPECT_EQ(error_of([&] { net::parse_server_url(bad); }), Errc::invalid_endpoint) << bad;
}

TEST(AgentClient, UnreachableServerIsReported) {
    orchestrator::IdleBrain brain("ai", world::AgentKind::ai);
    // Port 1 is privileged and closed in the test environment.
    EXPECT_EQ(error_of([&] { net::run_agent(brain, "ws://127.0.0.1:1/play"); }), Errc::connection_lost);
}

TEST(PlayServer, AgentsPlayAShortMissionOverWebSockets) {
    auto cfg = world::default_config();
    cfg.time_limit_s = 3.0;
    cfg.require_collaboration = false;
    server::GameServer game(cfg, {});
    net::PlayServerOptions opts;
    opts.host = "127.0.0.1";
    opts.port = 0;
    opts.linger_s = 0.3;
    net::PlayServer play(game, opts);
    const auto port = play.bind();
    ASSERT_GT(port, 0);
    std::thread server([&] { play.run(); });

    const std::string url = "ws://127.0.0.1:" + std::to_string(port) + "/play";
    orchestrator::ScriptedHuman human;
    orchestrator::DtBrain ai(agent::reference_policy(), "ai");
    auto h = std::async(std::launch::async, [&] { return net::run_agent(human, url); });
    auto a = std::async(std::launch::async, [&] { return net::run_agent(ai, url); });
    const auto hr = h.get();
    const auto ar = a.get();
    server.join();

    EXPECT_EQ(hr.outcome, "failure");
    EXPECT_EQ(ar.outcome, "failure");
    ASSERT_TRUE(game.finished());
    EXPECT_DOUBLE_EQ(*game.artifacts().outcome.ended_at, 3.0);
    EXPECT_GT(ai.runtime().decisions(), 0u);
    EXPECT_EQ(game.traces_received(), ai.runtime().decisions());
    EXPECT_GT(game.artifacts().timeline.events.size(), 10u);
}

TEST(PlayServer, PortInUseIsReported) {
    server::GameServer game(world::default_config(), {});
    net::PlayServerOptions opts;
    opts.host = "127.0.0.1";
    opts.port = 0;
    net::PlayServer first(game, opts);
    opts.port = first.bind();
    net::PlayServer second(game, opts);
    EXPECT_EQ(error_of([&] { second.bind(); }), Errc::io_failure);
}

class AaeHttp : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = new fs::path(fs::temp_directory_path() / ("hmt_net_test_missions_" + std::to_string(::getpid())));
        fs::remove_all(*root_);
        orchestrator::EpisodeOptions o;
        o.config = world::default_config();
        o.seed = 3;
        o.missions_dir = *root_;
        orchestrator::run_episode(o);
    }
    static void TearDownTestSuite() {
        fs::remove_all(*root_);
        delete root_;
    }

    void SetUp() override {
        service_ = std::make_unique<aae::AaeService>(
            std::make_shared<aae::MissionStore>(*root_),
            std::make_shared<llm::MockLanguageModel>(llm::MockLanguageModel::default_script()));
        http_ = std::make_unique<net::AaeHttpServer>(*service_);
        port_ = http_->bind("127.0.0.1", 0);
        thread_ = std::thread([this] { http_->listen(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }
    void TearDown() override {
        http_->stop();
        thread_.join();
    }

    static fs::path* root_;
    std::unique_ptr<aae::AaeService> service_;
    std::unique_ptr<net::AaeHttpServer> http_;
    std::unique_ptr<httplib::Client> client_;
    std::thread thread_;
    int port_ = 0;
};

fs::path* AaeHttp::root_ = nullptr;

TEST_F(AaeHttp, ListsMissionsAndServesTimeline) {
    auto r = client_->Get("/missions");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    const auto list = json::parse(r->body);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0]["id"], "house-dt-seed3");
    EXPECT_EQ(list[0]["outcome"], "success");

    r = client_->Get("/missions/house-dt-seed3/timeline");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(log::parse_timeline(r->body), *service_->missions().load("house-dt-seed3").timeline);

    r = client_->Get("/missions/house-dt-seed3/context");
    ASSERT_TRUE(r);
    EXPECT_NE(r->body.find("Mission context"), std::string::npos);

    r = client_->Get("/missions/nope/timeline");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404);
    EXPECT_EQ(json::parse(r->body)["error"], "mission_not_found");
}

TEST_F(AaeHttp, MarkersAndFrames) {
    auto r = client_->Get("/missions/house-dt-seed3/markers?kinds=phase_change");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200);
    const auto markers = json::parse(r->body);
    ASSERT_EQ(markers.size(), 4u);
    for (const auto& m : markers) EXPECT_EQ(m["kind"], "phase_change");

    r = client_->Get("/missions/house-dt-seed3/markers?kinds=bogus");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);

    r = client_->Get("/missions/house-dt-seed3/frame?t=5&view=topdown");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
    EXPECT_EQ(r->body.substr(1, 3), "PNG");

    r = client_->Get("/missions/house-dt-seed3/frame?t=99999");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(json::parse(r->body)["error"], "t_out_of_range");
}

TEST_F(AaeHttp, ChatSessionRoundTrip) {
    auto r = client_->Post("/sessions", R"({"mission_id": "house-dt-seed3"})", "application/json");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 201);
    const std::string id = json::parse(r->body)["id"];

    r = client_->Post("/sessions/" + id + "/query", R"({"text": "what phase at t=0?", "playhead_s": 12})",
                      "application/json");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << r->body;
    const auto body = json::parse(r->body);
    EXPECT_EQ(body["answer"], "At t=0 s the mission was in phase 1.");
    EXPECT_EQ(body["history_length"], 2);

    r = client_->Get("/sessions/" + id);
    ASSERT_TRUE(r);
    EXPECT_EQ(json::parse(r->body)["history"].size(), 2u);

    r = client_->Post("/sessions/" + id + "/query", R"({"text": "", "playhead_s": 1})", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(json::parse(r->body)["error"], "empty_query");

    r = client_->Post("/sessions/session-404/query", R"({"text": "hi", "playhead_s": 1})", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404);
}

TEST(AaeHttpStatus, MapsErrorCodes) {
    EXPECT_EQ(net::http_status_for(Errc::mission_not_found), 404);
    EXPECT_EQ(net::http_status_for(Errc::session_not_found), 404);
    EXPECT_EQ(net::http_status_for(Errc::context_missing), 409);
    EXPECT_EQ(net::http_status_for(Errc::llm_unavailable), 503);
    EXPECT_EQ(net::http_status_for(Errc::empty_query), 400);
}

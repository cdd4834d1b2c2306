#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <thread>

#include <unistd.h>

#include "hmt/aae/aae.hpp"
#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/orchestrator/episode.hpp"

using namespace hmt;
using namespace hmt::aae;
namespace fs = std::filesystem;

namespace {

// One recorded mission on disk, shared by the whole test binary.
struct Missions {
    fs::path root = fs::temp_directory_path() / ("hmt_aae_test_missions_" + std::to_string(::getpid()));
    std::string id = "house-dt-seed3";

    Missions() {
        fs::remove_all(root);
        orchestrator::EpisodeOptions o;
        o.config = world::default_config();
        o.seed = 3;
        o.missions_dir = root;
        orchestrator::run_episode(o);
    }
    ~Missions() { fs::remove_all(root); }
};

const Missions& missions() {
    static Missions m;
    return m;
}

std::shared_ptr<MissionStore> store() { return std::make_shared<MissionStore>(missions().root); }

std::shared_ptr<llm::MockLanguageModel> phase_model() {
    return std::make_shared<llm::MockLanguageModel>(llm::MockLanguageModel::default_script());
}

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io_failure;
}

// Independent oracle: the phase in force at t is the last logged phase
// change at or before t, or 1 before any change.
int phase_at(const log::MissionTimeline& tl, double t) {
    int phase = 1;
    for (const auto& e : tl.events)
        if (e.timestamp <= t && e.action.contains("world") && e.action["world"].contains("phase"))
            phase = e.action["world"]["phase"].get<int>();
    return phase;
}

}  // namespace

TEST(MissionStore, ListsLoadsAndReportsMissingData) {
    auto s = store();
    EXPECT_EQ(s->list(), std::vector<std::string>{missions().id});
    const auto m = s->load(missions().id);
    ASSERT_TRUE(m.timeline);
    EXPECT_GT(m.timeline->events.size(), 100u);
    EXPECT_EQ(s->load(missions().id).timeline.get(), m.timeline.get()) << "parsed once";
    EXPECT_NE(s->context(missions().id).find("Mission context"), std::string::npos);
    EXPECT_EQ(error_of([&] { s->load("nope"); }), Errc::mission_not_found);
    EXPECT_EQ(error_of([&] { s->load("../etc"); }), Errc::mission_not_found);

    const fs::path other = fs::temp_directory_path() / ("hmt_aae_test_nocontext_" + std::to_string(::getpid()));
    fs::remove_all(other);
    fs::create_directories(other / "m1");
    fs::copy_file(missions().root / missions().id / "timeline.json", other / "m1" / "timeline.json");
    EXPECT_EQ(error_of([&] { MissionStore(other).context("m1"); }), Errc::context_missing);
    fs::remove_all(other);
}

TEST(Prompt, BundlesAreComplete) {
    auto s = store();
    const auto m = s->load(missions().id);
    const std::string context = s->context(missions().id);
    const std::string timeline_text = log::serialize_timeline(*m.timeline);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        std::vector<HistoryEntry> history;
        const int turns = std::uniform_int_distribution<int>(0, 6)(rng);
        for (int k = 0; k < turns; ++k) {
            history.push_back({"user", "question " + std::to_string(i) + "." + std::to_string(k)});
            history.push_back({"assistant", "answer " + std::to_string(i) + "." + std::to_string(k)});
        }
        const double playhead = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
        const std::string query = "why did the AI do that? #" + std::to_string(i);
        const auto b = assemble_prompt(context, *m.timeline, history, query, playhead);
        const auto msgs = b.messages();

        ASSERT_EQ(msgs.size(), 3 + history.size());
        EXPECT_EQ(msgs[0].role, "system");
        EXPECT_EQ(msgs[0].content.substr(0, context.size()), context);
        EXPECT_NE(msgs[0].content.find(kAnsweringInstructions), std::string::npos);
        EXPECT_NE(msgs[1].content.find(kTimelineMarker), std::string::npos);
        EXPECT_NE(msgs[1].content.find(timeline_text), std::string::npos);
        EXPECT_FALSE(b.truncated);
        for (std::size_t k = 0; k < history.size(); ++k) {
            EXPECT_EQ(msgs[2 + k].role, history[k].role);
            EXPECT_EQ(msgs[2 + k].content, history[k].text);
        }
        EXPECT_EQ(msgs.back().role, "user");
        EXPECT_EQ(msgs.back().content, playhead_line(playhead) + "\n\n" + query);
        EXPECT_EQ(playhead_line(playhead).rfind("Playhead: t=" + format_seconds(playhead) + " s", 0), 0u);
    }
}

TEST(Prompt, TruncationKeepsWindowAndPhaseChanges) {
    auto s = store();
    const auto m = s->load(missions().id);
    PromptOptions small;
    small.token_budget = 20000;
    small.window_s = 10.0;
    const double playhead = 50.0;
    const auto b = assemble_prompt("ctx", *m.timeline, {}, "q", playhead, small);
    ASSERT_TRUE(b.truncated);
    std::size_t expected = 0;
    std::size_t phases = 0;
    for (const auto& e : m.timeline->events) {
        const bool phase = e.action.contains("world") && e.action["world"].contains("phase");
        phases += phase;
        expected += phase || (e.timestamp >= 40.0 && e.timestamp <= 60.0);
    }
    EXPECT_EQ(b.events_included, expected);
    EXPECT_LT(b.events_included, m.timeline->events.size());
    EXPECT_NE(b.data.find("Note:"), std::string::npos);
    EXPECT_EQ(truncate_events(*m.timeline, playhead, small.window_s).size(), expected);
    EXPECT_GE(phases, 4u);
}

TEST(Service, PhaseAnswersMatchTimeline) {
    AaeService svc(store(), phase_model());
    const auto session = svc.create_session(missions().id);
    const auto tl = svc.missions().load(missions().id).timeline;
    const double end = *tl->footer->ended_at;
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        const double t = std::round(std::uniform_real_distribution<double>(0.0, end)(rng) * 10) / 10;
        const double playhead = std::uniform_real_distribution<double>(0.0, end)(rng);
        const auto answer = svc.query(session.id, "What phase was the mission in at t=" + format_seconds(t) + "?", playhead);
        EXPECT_EQ(answer, "At t=" + format_seconds(t) + " s the mission was in phase " + std::to_string(phase_at(*tl, t)) + ".");
    }
    // Without a time in the question, the playhead is used.
    const auto answer = svc.query(session.id, "which phase is this?", 80.0);
    EXPECT_EQ(answer, "At t=80 s the mission was in phase " + std::to_string(phase_at(*tl, 80.0)) + ".");
}

TEST(Service, HistoryIsKeptInOrder) {
    auto model = phase_model();
    AaeService svc(store(), model);
    const auto s = svc.create_session(missions().id);
    svc.query(s.id, "phase at t=10?", 0.0);
    svc.query(s.id, "phase at t=60?", 0.0);
    svc.query(s.id, "anything else?", 0.0);
    const auto h = svc.session(s.id).history;
    ASSERT_EQ(h.size(), 6u);
    EXPECT_EQ(h[0], (HistoryEntry{"user", "phase at t=10?"}));
    EXPECT_EQ(h[2].text, "phase at t=60?");
    EXPECT_EQ(h[4].text, "anything else?");
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_EQ(h[i].role, i % 2 ? "assistant" : "user");
    // The third call carried the first two exchanges.
    ASSERT_EQ(model->calls().size(), 3u);
    EXPECT_EQ(model->calls()[2].size(), 3u + 4u);
}

TEST(Service, FailuresLeaveHistoryUntouched) {
    AaeService svc(store(), std::make_shared<llm::MockLanguageModel>(nlohmann::json{{"unavailable", true}}));
    const auto s = svc.create_session(missions().id);
    EXPECT_EQ(error_of([&] { svc.query(s.id, "phase at t=3?", 0.0); }), Errc::llm_unavailable);
    EXPECT_EQ(error_of([&] { svc.query(s.id, "  ", 0.0); }), Errc::empty_query);
    EXPECT_EQ(error_of([&] { svc.query("session-999", "hi", 0.0); }), Errc::session_not_found);
    EXPECT_EQ(error_of([&] { svc.create_session("nope"); }), Errc::mission_not_found);
    EXPECT_TRUE(svc.session(s.id).history.empty());
}

TEST(Service, SessionsPersistAcrossRestarts) {
    const fs::path dir = fs::temp_directory_path() / ("hmt_aae_test_sessions_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    std::string id;
    {
        AaeService svc(store(), phase_model(), dir);
        id = svc.create_session(missions().id).id;
        svc.query(id, "phase at t=20?", 0.0);
    }
    AaeService again(store(), phase_model(), dir);
    const auto s = again.session(id);
    EXPECT_EQ(s.mission_id, missions().id);
    EXPECT_EQ(s.history.size(), 2u);
    const auto round = session_from_json(to_json(s));
    EXPECT_EQ(round.history, s.history);
    EXPECT_NE(again.create_session(missions().id).id, id);
    fs::remove_all(dir);
}

TEST(Service, ConcurrentSessionsStayIndependent) {
    AaeService svc(store(), phase_model());
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(svc.create_session(missions().id).id);
    std::vector<std::thread> threads;
    for (const auto& id : ids)
        threads.emplace_back([&svc, id] {
            for (int k = 0; k < 3; ++k) svc.query(id, "phase at t=" + std::to_string(10 * k) + "?", 0.0);
        });
    for (auto& t : threads) t.join();
    for (const auto& id : ids) {
        const auto h = svc.session(id).history;
        ASSERT_EQ(h.size(), 6u);
        EXPECT_EQ(h[0].text, "phase at t=0?");
        EXPECT_EQ(h[4].text, "phase at t=20?");
    }
}

TEST(Frames, CachedPngMatchesFreshRender) {
    const auto s = store();
    const auto cache = missions().root / missions().id / "frames" / "topdown-12500.png";
    fs::remove(cache);
    const auto first = frame_png(*s, missions().id, 12.5, "topdown");
    EXPECT_TRUE(fs::exists(cache));
    EXPECT_EQ(frame_png(*s, missions().id, 12.5, "topdown"), first);
    EXPECT_EQ(read_file(cache), first);
    EXPECT_NE(frame_png(*s, missions().id, 12.5, "ai"), first);
    EXPECT_EQ(error_of([&] { frame_png(*s, missions().id, 1e6, "topdown"); }), Errc::t_out_of_range);
    EXPECT_EQ(error_of([&] { frame_png(*s, missions().id, 1.0, "drone"); }), Errc::unknown_viewpoint);
}

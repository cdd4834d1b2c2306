#include "hmt/aae/aae.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/replay/render.hpp"

namespace hmt::aae {

namespace fs = std::filesystem;

namespace {

bool valid_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

}  // namespace

MissionStore::MissionStore(fs::path root) : root_(std::move(root)) {}

fs::path MissionStore::dir_of(const std::string& id) const {
    if (!valid_id(id)) throw Error(Errc::mission_not_found, "no mission '" + id + "'");
    const fs::path dir = root_ / id;
    if (!fs::is_regular_file(dir / "timeline.json")) throw Error(Errc::mission_not_found, "no mission '" + id + "'");
    return dir;
}

std::vector<std::string> MissionStore::list() const {
    std::vector<std::string> ids;
    if (!fs::is_directory(root_)) return ids;
    for (const auto& entry : fs::directory_iterator(root_))
        if (entry.is_directory() && fs::is_regular_file(entry.path() / "timeline.json"))
            ids.push_back(entry.path().filename().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

LoadedMission MissionStore::load(const std::string& id) const {
    const fs::path dir = dir_of(id);
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(id); it != cache_.end()) return {id, dir, it->second};
    }
    auto timeline = std::make_shared<const log::MissionTimeline>(log::load_timeline(dir / "timeline.json"));
    std::lock_guard lock(mu_);
    auto [it, inserted] = cache_.try_emplace(id, std::move(timeline));
    return {id, dir, it->second};
}

std::string MissionStore::context(const std::string& id) const {
    const fs::path path = dir_of(id) / "context.md";
    if (!fs::is_regular_file(path)) throw Error(Errc::context_missing, "mission '" + id + "' has no context.md");
    std::string text = read_file(path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(Errc::context_missing, "context.md for mission '" + id + "' is empty");
    return text;
}

json to_json(const ChatSession& s) {
    json h = json::array();
    for (const auto& e : s.history) h.push_back({{"role", e.role}, {"text", e.text}});
    return {{"id", s.id}, {"mission_id", s.mission_id}, {"created_at", s.created_at}, {"history", h}};
}

ChatSession session_from_json(const json& j) {
    ChatSession s;
    s.id = j.at("id").get<std::string>();
    s.mission_id = j.at("mission_id").get<std::string>();
    s.created_at = j.value("created_at", 0.0);
    for (const auto& e : j.at("history")) s.history.push_back({e.at("role"), e.at("text")});
    return s;
}

std::vector<llm::Message> PromptBundle::messages() const {
    std::vector<llm::Message> out;
    out.push_back({"system", system});
    out.push_back({"user", data});
    for (const auto& h : history) out.push_back({h.role, h.text});
    out.push_back({"user", playhead + "\n\n" + query});
    return out;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string playhead_line(double playhead) {
    return "Playhead: t=" + format_seconds(playhead) + " s (the viewer is currently at t=" +
           format_seconds(playhead) + " s in the replay)";
}

std::vector<log::TimelineEvent> truncate_events(const log::MissionTimeline& tl, double playhead, double window_s) {
    std::vector<log::TimelineEvent> kept;
    for (const auto& e : tl.events) {
        const bool near = std::abs(e.timestamp - playhead) <= window_s;
        const bool phase = e.action.contains("world") && e.action["world"].contains("phase");
        if (near || phase) kept.push_back(e);
    }
    return kept;
}

namespace {

std::string data_part(const log::MissionTimeline& tl, const std::string& notice) {
    std::string s = std::string(kTimelineMarker) +
                    " (the mission log: a header, then one event per line with `timestamp` in seconds and "
                    "`action` holding what changed):\n";
    if (!notice.empty()) s += notice + "\n";
    s += "```json\n" + log::serialize_timeline(tl) + "```";
    return s;
}

}  // namespace

PromptBundle assemble_prompt(const std::string& context_doc, const log::MissionTimeline& timeline,
                             const std::vector<HistoryEntry>& history, const std::string& query, double playhead,
                             const PromptOptions& options) {
    PromptBundle b;
    b.system = context_doc + "\n\n" + std::string(kAnsweringInstructions);
    b.data = data_part(timeline, "");
    b.events_included = timeline.events.size();
    if (estimate_tokens(b.data) > options.token_budget) {
        log::MissionTimeline cut = timeline;
        cut.events = truncate_events(timeline, playhead, options.window_s);
        b.events_included = cut.events.size();
        b.truncated = true;
        b.data = data_part(cut, "Note: the full timeline is too long, so " +
                                    std::to_string(timeline.events.size() - cut.events.size()) + " of " +
                                    std::to_string(timeline.events.size()) + " events were elided. Shown: events "
                                    "within " + format_seconds(options.window_s) +
                                    " s of the playhead and every phase change.");
    }
    b.history = history;
    b.playhead = playhead_line(playhead);
    b.query = query;
    return b;
}

AaeService::AaeService(std::shared_ptr<MissionStore> missions, std::shared_ptr<llm::LanguageModelClient> model,
                       std::optional<fs::path> persist_dir, PromptOptions prompt)
    : missions_(std::move(missions)), model_(std::move(model)), persist_dir_(std::move(persist_dir)), prompt_(prompt) {
    if (!persist_dir_) return;
    fs::create_directories(*persist_dir_);
    for (const auto& entry : fs::directory_iterator(*persist_dir_)) {
        if (entry.path().extension() != ".json") continue;
        try {
            auto slot = std::make_shared<Slot>();
            slot->session = session_from_json(json::parse(read_file(entry.path())));
            sessions_[slot->session.id] = slot;
        } catch (const std::exception&) {
            // Unreadable session files are skipped; they never block startup.
        }
    }
}

std::string AaeService::next_id() {
    std::string id;
    do id = "session-" + std::to_string(++counter_);
    while (sessions_.count(id));
    return id;
}

ChatSession AaeService::create_session(const std::string& mission_id) {
    missions_->load(mission_id);
    missions_->context(mission_id);
    auto slot = std::make_shared<Slot>();
    {
        std::lock_guard lock(mu_);
        slot->session.id = next_id();
        slot->session.mission_id = mission_id;
        slot->session.created_at =
            std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
        sessions_[slot->session.id] = slot;
    }
    persist(slot->session);
    return slot->session;
}

std::shared_ptr<AaeService::Slot> AaeService::slot(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(Errc::session_not_found, "no session '" + id + "'");
    return it->second;
}

ChatSession AaeService::session(const std::string& id) const {
    auto s = slot(id);
    std::lock_guard lock(s->mu);
    return s->session;
}

PromptBundle AaeService::preview(const std::string& session_id, const std::string& text, double playhead) const {
    const ChatSession s = session(session_id);
    const auto mission = missions_->load(s.mission_id);
    return assemble_prompt(missions_->context(s.mission_id), *mission.timeline, s.history, text, playhead, prompt_);
}

std::string AaeService::query(const std::string& session_id, const std::string& text, double playhead) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw Error(Errc::empty_query, "query text is empty");
    auto s = slot(session_id);
    std::lock_guard lock(s->mu);
    const auto mission = missions_->load(s->session.mission_id);
    const PromptBundle bundle = assemble_prompt(missions_->context(s->session.mission_id), *mission.timeline,
                                                s->session.history, text, playhead, prompt_);
    if (!model_) throw Error(Errc::llm_unavailable, "no language model configured");
    const std::string answer = model_->complete(bundle.messages());
    s->session.history.push_back({"user", text});
    s->session.history.push_back({"assistant", answer});
    persist(s->session);
    return answer;
}

void AaeService::persist(const ChatSession& s) const {
    if (!persist_dir_) return;
    write_file(*persist_dir_ / (s.id + ".json"), to_json(s).dump(2) + "\n");
}

std::string frame_png(const MissionStore& store, const std::string& mission_id, double t, const std::string& view) {
    const auto mission = store.load(mission_id);
    const auto snap = replay::reconstruct(*mission.timeline, t);
    if (view != "topdown" && !snap.world.find_agent(view))
        throw Error(Errc::unknown_viewpoint, "view must be 'topdown' or an agent id, got '" + view + "'");
    const auto ms = static_cast<long long>(std::llround(t * 1000.0));
    const fs::path cache = mission.directory / "frames" / (view + "-" + std::to_string(ms) + ".png");
    // Cache only exact millisecond playheads so cached bytes match a fresh render.
    const bool cacheable = std::abs(ms / 1000.0 - t) < 1e-12 && valid_id(view);
    if (cacheable && fs::is_regular_file(cache)) return read_file(cache);
    std::string png = replay::encode_png(replay::render_frame(snap, view));
    if (cacheable) {
        std::error_code ec;
        fs::create_directories(cache.parent_path(), ec);
        if (!ec) {
            try {
                write_file(cache, png);
            } catch (const Error&) {
                // A read-only missions directory just means no cache.
            }
        }
    }
    return png;
}

}  // namespace hmt::aae

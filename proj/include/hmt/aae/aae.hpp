#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmt/llm/client.hpp"
#include "hmt/log/timeline.hpp"
#include "hmt/replay/replay.hpp"

namespace hmt::aae {

using nlohmann::json;

inline constexpr std::string_view kTimelineMarker = "Mission timeline data";
inline constexpr std::string_view kAnsweringInstructions =
    "You are the after-action explanation assistant for a human-AI teaming mission. Answer questions about what "
    "happened and why, using only the mission context and timeline below. Cite event timestamps in seconds "
    "(for example \"at t=42.5 s\") for every claim so the viewer can jump to them. When the viewer asks about "
    "\"now\" or \"this moment\", use the playhead time. Say so when the timeline does not contain the answer.";

struct LoadedMission {
    std::string id;
    std::filesystem::path directory;
    std::shared_ptr<const log::MissionTimeline> timeline;
};

// Missions on disk: <root>/<id>/{timeline.json, context.md, frames/}.
// Timelines are parsed once and shared read-only afterwards.
class MissionStore {
public:
    explicit MissionStore(std::filesystem::path root);

    std::vector<std::string> list() const;
    LoadedMission load(const std::string& id) const;       // throws mission_not_found
    std::string context(const std::string& id) const;      // throws mission_not_found, context_missing
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path dir_of(const std::string& id) const;

    std::filesystem::path root_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<const log::MissionTimeline>> cache_;
};

struct HistoryEntry {
    std::string role;  // "user" or "assistant"
    std::string text;
    bool operator==(const HistoryEntry&) const = default;
};

struct ChatSession {
    std::string id;
    std::string mission_id;
    std::vector<HistoryEntry> history;
    double created_at = 0.0;  // seconds since the epoch
};

json to_json(const ChatSession& s);
ChatSession session_from_json(const json& j);

struct PromptBundle {
    std::string system;    // context doc + answering instructions
    std::string data;      // timeline, possibly truncated
    std::vector<HistoryEntry> history;
    std::string playhead;  // "Playhead: t=X s ..."
    std::string query;
    bool truncated = false;
    std::size_t events_included = 0;

    std::vector<llm::Message> messages() const;
};

struct PromptOptions {
    std::size_t token_budget = 400000;  // approximate; 4 characters per token
    double window_s = 60.0;             // kept around the playhead when truncating
};

std::size_t estimate_tokens(std::string_view text);

// Events kept when the timeline is over budget: within window_s of the
// playhead, plus every event that changes the phase.
std::vector<log::TimelineEvent> truncate_events(const log::MissionTimeline& timeline, double playhead, double window_s);

PromptBundle assemble_prompt(const std::string& context_doc, const log::MissionTimeline& timeline,
                             const std::vector<HistoryEntry>& history, const std::string& query, double playhead,
                             const PromptOptions& options = {});

std::string playhead_line(double playhead);

// Session registry plus the query path. Queries within one session are
// serialized; different sessions proceed independently.
class AaeService {
public:
    AaeService(std::shared_ptr<MissionStore> missions, std::shared_ptr<llm::LanguageModelClient> model,
               std::optional<std::filesystem::path> persist_dir = std::nullopt, PromptOptions prompt = {});

    ChatSession create_session(const std::string& mission_id);
    ChatSession session(const std::string& id) const;  // throws session_not_found
    // Throws empty_query, session_not_found, llm_unavailable (history unchanged).
    std::string query(const std::string& session_id, const std::string& text, double playhead);
    PromptBundle preview(const std::string& session_id, const std::string& text, double playhead) const;

    MissionStore& missions() { return *missions_; }

private:
    struct Slot {
        std::mutex mu;
        ChatSession session;
    };

    std::shared_ptr<Slot> slot(const std::string& id) const;
    void persist(const ChatSession& s) const;
    std::string next_id();

    std::shared_ptr<MissionStore> missions_;
    std::shared_ptr<llm::LanguageModelClient> model_;
    std::optional<std::filesystem::path> persist_dir_;
    PromptOptions prompt_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t counter_ = 0;
};

// Frames as PNG bytes, cached under <mission>/frames/.
std::string frame_png(const MissionStore& store, const std::string& mission_id, double t, const std::string& view);

}  // namespace hmt::aae

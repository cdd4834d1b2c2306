#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hmt/agent/trace.hpp"
#include "hmt/log/timeline.hpp"

namespace hmt::log {

struct ChatEntry {
    std::string from;
    std::string text;
    double sim_time = 0.0;
};

// Event recorder fed once per tick by the server loop. Fields are compared
// against the last logged value, so every event carries exactly what changed
// since the previous event and replay can reconstruct logged states exactly.
class MissionLog {
public:
    // Throws already_open, or mission_not_started unless a human and an AI
    // agent have both joined `start`.
    void open(const std::string& mission_id, const world::WorldState& start);

    void submit_trace(const std::string& agent_id, const agent::DecisionTrace& trace);
    void submit_chat(const ChatEntry& chat);
    void annotate(const std::string& text);

    // Emits at most one event for this snapshot; returns whether it did.
    // Pending traces, chat and annotations are merged into the same event.
    bool record(const world::WorldState& snapshot);

    // Flushes pending submissions, writes the footer. Throws not_open.
    MissionTimeline close(const world::MissionOutcome& outcome);

    bool is_open() const { return open_; }
    const MissionTimeline& timeline() const { return timeline_; }
    std::size_t traces_logged() const { return traces_logged_; }

private:
    json agent_delta(const world::AgentState& now, const world::AgentState& logged, bool& triggered) const;

    bool open_ = false;
    bool closed_ = false;
    MissionTimeline timeline_;
    world::WorldState baseline_;
    double last_clock_ = 0.0;
    json pending_traces_ = json::array();
    json pending_chat_ = json::array();
    std::optional<std::string> pending_annotation_;
    std::size_t traces_logged_ = 0;
};

}  // namespace hmt::log

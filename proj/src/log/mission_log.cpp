#include "hmt/log/mission_log.hpp"

#include "hmt/agent/phase.hpp"
#include "hmt/common/error.hpp"
#include "hmt/protocol/codec.hpp"
#include "hmt/world/serialize.hpp"

namespace hmt::log {

namespace {

int phase_of(const world::WorldState& w) {
    return agent::current_phase(world::completion_score(w), agent::PhaseThresholds(w.config->phase_thresholds));
}

world::AgentState observable_copy(const world::AgentState& a) {
    world::AgentState c = a;
    c.task = {};
    return c;
}

}  // namespace

void MissionLog::open(const std::string& mission_id, const world::WorldState& start) {
    if (open_ || closed_) throw Error(Errc::already_open, "log for mission '" + timeline_.header.mission_id + "'");
    std::vector<world::AgentKind> kinds;
    for (const auto& a : start.agents) kinds.push_back(a.kind);
    if (!start.started || !protocol::mission_start_gate(kinds))
        throw Error(Errc::mission_not_started, "logging starts once a human and an AI agent have joined");

    timeline_ = {};
    auto& h = timeline_.header;
    h.mission_id = mission_id;
    h.config = *start.config;
    h.config_digest = world::config_digest(*start.config);
    h.seed = start.config->seed;
    h.start_time = start.clock;
    for (const auto& a : start.agents) h.roster.push_back(observable_copy(a));
    baseline_ = start;
    last_clock_ = start.clock;
    open_ = true;
}

void MissionLog::submit_trace(const std::string& agent_id, const agent::DecisionTrace& trace) {
    if (!open_) throw Error(Errc::not_open, "trace submitted to a closed log");
    json t = protocol::to_json(trace);
    t["agent_id"] = agent_id;
    pending_traces_.push_back(std::move(t));
}

void MissionLog::submit_chat(const ChatEntry& chat) {
    if (!open_) throw Error(Errc::not_open, "chat submitted to a closed log");
    pending_chat_.push_back({{"from", chat.from}, {"text", chat.text}, {"sim_time", chat.sim_time}});
}

void MissionLog::annotate(const std::string& text) {
    if (!open_) throw Error(Errc::not_open, "annotation on a closed log");
    pending_annotation_ = pending_annotation_ ? *pending_annotation_ + "\n" + text : text;
}

json MissionLog::agent_delta(const world::AgentState& now, const world::AgentState& logged, bool& triggered) const {
    json d = json::object();
    if (now.position != logged.position) {
        d["position"] = world::to_json(now.position);
        if (distance(now.position, logged.position) >= baseline_.config->position_gate) triggered = true;
    }
    auto changed = [&](const char* key, bool differs, json value) {
        if (!differs) return;
        d[key] = std::move(value);
        triggered = true;
    };
    changed("inventory", now.inventory != logged.inventory, world::to_json(now.inventory));
    changed("behavior_state", now.behavior_state != logged.behavior_state, world::to_string(now.behavior_state));
    changed("held_item", now.held_item != logged.held_item,
            now.held_item.empty() ? json(nullptr) : json(now.held_item));
    changed("looking_at", now.looking_at != logged.looking_at,
            now.looking_at ? world::to_json(*now.looking_at) : json(nullptr));
    changed("action", now.action != logged.action, std::string(world::to_string(now.action)));
    return d;
}

bool MissionLog::record(const world::WorldState& snap) {
    if (!open_) throw Error(Errc::not_open, "record on a closed log");
    bool triggered = !pending_traces_.empty() || !pending_chat_.empty() || pending_annotation_.has_value();

    json agents = json::object();
    for (const auto& a : snap.agents) {
        const world::AgentState* logged = baseline_.find_agent(a.id);
        if (!logged) {
            agents[a.id] = {{"joined", world::observable_agent(a)}};
            triggered = true;
            continue;
        }
        json d = agent_delta(a, *logged, triggered);
        if (!d.empty()) agents[a.id] = std::move(d);
    }

    json world_delta = json::object();
    json blocks = json::array();
    for (int y = 0; y < snap.height(); ++y)
        for (int x = 0; x < snap.width(); ++x) {
            const Voxel v{x, y};
            const auto by_now = snap.placed_by.find(v);
            const auto by_then = baseline_.placed_by.find(v);
            const bool same_owner = (by_now == snap.placed_by.end()) == (by_then == baseline_.placed_by.end()) &&
                                    (by_now == snap.placed_by.end() || by_now->second == by_then->second);
            if (snap.at(v) == baseline_.at(v) && same_owner) continue;
            json b = world::to_json(v);
            b["block"] = world::to_json(snap.at(v));
            b["placed_by"] = by_now == snap.placed_by.end() ? json(nullptr) : json(by_now->second);
            blocks.push_back(std::move(b));
        }
    if (!blocks.empty()) {
        world_delta["blocks"] = std::move(blocks);
        const double completion = world::completion_score(snap);
        if (completion != world::completion_score(baseline_)) world_delta["completion"] = completion;
        if (const int phase = phase_of(snap); phase != phase_of(baseline_)) world_delta["phase"] = phase;
    }
    if (snap.chest != baseline_.chest) world_delta["chest"] = world::to_json(snap.chest);
    if (!world_delta.empty()) triggered = true;
    last_clock_ = snap.clock;

    if (!triggered) return false;

    json action = json::object();
    if (!agents.empty()) action["agents"] = std::move(agents);
    if (!world_delta.empty()) action["world"] = std::move(world_delta);
    if (!pending_traces_.empty()) {
        traces_logged_ += pending_traces_.size();
        action["decision_trace"] = std::exchange(pending_traces_, json::array());
    }
    if (!pending_chat_.empty()) action["chat"] = std::exchange(pending_chat_, json::array());
    if (pending_annotation_) {
        action["annotation"] = *pending_annotation_;
        pending_annotation_.reset();
    }
    timeline_.events.push_back({snap.clock, std::move(action)});

    baseline_ = snap;
    for (auto& a : baseline_.agents) a.task = {};
    return true;
}

MissionTimeline MissionLog::close(const world::MissionOutcome& outcome) {
    if (!open_) throw Error(Errc::not_open, closed_ ? "log already closed" : "log was never opened");
    if (outcome.status == world::MissionOutcome::Status::ongoing)
        throw Error(Errc::not_open, "cannot close a log with an ongoing outcome");
    // Late submissions still need a home; they ride on a final event.
    if (!pending_traces_.empty() || !pending_chat_.empty() || pending_annotation_) {
        json action = json::object();
        if (!pending_traces_.empty()) {
            traces_logged_ += pending_traces_.size();
            action["decision_trace"] = std::exchange(pending_traces_, json::array());
        }
        if (!pending_chat_.empty()) action["chat"] = std::exchange(pending_chat_, json::array());
        if (pending_annotation_) action["annotation"] = *pending_annotation_;
        pending_annotation_.reset();
        timeline_.events.push_back({last_clock_, std::move(action)});
    }
    timeline_.footer = outcome;
    open_ = false;
    closed_ = true;
    return timeline_;
}

}  // namespace hmt::log

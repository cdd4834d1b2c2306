#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmt/world/config.hpp"
#include "hmt/world/types.hpp"
#include "hmt/world/world.hpp"

namespace hmt::log {

using nlohmann::json;

// One event: exactly {"timestamp": seconds, "action": {...}}. `action` may
// hold "agents" (id -> changed fields), "world" (blocks, chest, completion,
// phase), "decision_trace" (list), "chat" (list) and "annotation".
struct TimelineEvent {
    double timestamp = 0.0;
    json action = json::object();

    bool operator==(const TimelineEvent&) const = default;
};

struct TimelineHeader {
    std::string mission_id;
    world::MissionConfig config;
    std::string config_digest;
    std::uint64_t seed = 0;
    double start_time = 0.0;
    std::vector<world::AgentState> roster;  // observable fields only

    bool operator==(const TimelineHeader&) const = default;
};

struct MissionTimeline {
    TimelineHeader header;
    std::vector<TimelineEvent> events;
    std::optional<world::MissionOutcome> footer;

    bool operator==(const MissionTimeline&) const = default;
};

json to_json(const TimelineEvent& event);
json to_json(const MissionTimeline& timeline);

// Pretty-printed file contents. `bare_array` emits only the event array.
std::string serialize_timeline(const MissionTimeline& timeline, bool bare_array = false);

// Throws Error(schema_invalid) with a line number for syntax errors and a
// field path (plus the line where the offending event starts) otherwise.
MissionTimeline parse_timeline(std::string_view text);
MissionTimeline load_timeline(const std::filesystem::path& path);
void write_timeline(const std::filesystem::path& path, const MissionTimeline& timeline, bool bare_array = false);

// Checks a single event object against the two-key rule and field types.
void validate_event(const json& event, const std::string& where);

// World at the start of the log: fixtures from the config, agents from the roster.
world::WorldState initial_world(const TimelineHeader& header);

// Applies one event's deltas. Throws Error(schema_invalid) for an event that
// names an agent that never joined.
void apply_event(world::WorldState& world, const TimelineEvent& event);

}  // namespace hmt::log

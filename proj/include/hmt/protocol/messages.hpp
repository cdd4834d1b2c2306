#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hmt/agent/trace.hpp"
#include "hmt/world/types.hpp"
#include "hmt/world/world.hpp"

namespace hmt::protocol {

inline constexpr int kSchemaVersion = 1;

using world::ActionRequest;
using world::AgentKind;
using world::Material;

// Static layout an agent needs to plan; sent once with `joined`.
struct WorldInfo {
    int width = 0;
    int height = 0;
    std::vector<world::TowerSpec> towers;  // initial counts
    Voxel crafting_table;
    Voxel chest;
    world::FloorPlan plan;
    double reach = 1.5;
    double agent_speed = 4.0;
    double activity_radius = 2.0;
    int inventory_capacity = 64;
    int pickaxe_cost = 3;
    Material pickaxe_material = "wood";
    double time_limit_s = 0.0;
    double tick_rate_hz = 20.0;

    bool operator==(const WorldInfo&) const = default;
};

struct AgentView {
    std::string id;
    AgentKind kind = AgentKind::human;
    Position position;
    world::Inventory inventory;
    std::string held_item;
    std::optional<Voxel> looking_at;
    world::ActivityLabel behavior_state;
    world::ActionKind action = world::ActionKind::idle;
    bool can_place = true;

    bool operator==(const AgentView&) const = default;
};

struct TowerStatus {
    Voxel at;
    Material material;
    int remaining = 0;

    bool operator==(const TowerStatus&) const = default;
};

struct LayerStatus {
    Material material;
    int filled = 0;
    int total = 0;

    bool operator==(const LayerStatus&) const = default;
};

struct WorldSummary {
    double completion = 0.0;
    double clock = 0.0;
    int phase = 1;
    std::map<Material, int> chest;
    std::vector<TowerStatus> towers;
    std::vector<LayerStatus> layers;
    std::vector<Voxel> placed;

    bool operator==(const WorldSummary&) const = default;
};

// ---- server -> client

struct Joined {
    std::string agent_id;
    AgentKind kind = AgentKind::human;
    std::optional<WorldInfo> world_info;
    bool operator==(const Joined&) const = default;
};

struct StateUpdate {
    std::vector<AgentView> agents;
    WorldSummary world;
    bool operator==(const StateUpdate&) const = default;
};

struct ChatRelay {
    std::string from;
    std::string text;
    bool operator==(const ChatRelay&) const = default;
};

struct MissionEnd {
    world::MissionOutcome outcome;
    bool operator==(const MissionEnd&) const = default;
};

struct ErrorNotice {
    std::string code;
    std::string detail;
    bool operator==(const ErrorNotice&) const = default;
};

using ServerMessage = std::variant<Joined, StateUpdate, ChatRelay, MissionEnd, ErrorNotice>;

// ---- client -> server

struct Join {
    std::string name;
    AgentKind kind = AgentKind::human;
    // Absent: humans may place, AI agents may not.
    std::optional<bool> can_place;
    bool operator==(const Join&) const = default;
};

struct ActionMsg {
    ActionRequest action;
    bool operator==(const ActionMsg&) const = default;
};

struct ChatSend {
    std::string text;
    bool operator==(const ChatSend&) const = default;
};

struct TraceMsg {
    agent::DecisionTrace trace;
    bool operator==(const TraceMsg&) const = default;
};

struct Disconnect {
    bool operator==(const Disconnect&) const = default;
};

using ClientMessage = std::variant<Join, ActionMsg, ChatSend, TraceMsg, Disconnect>;

struct Envelope {
    std::int64_t seq = 0;
    double sim_time = 0.0;
    std::variant<ServerMessage, ClientMessage> payload;

    bool operator==(const Envelope&) const = default;
};

std::string_view message_type(const ServerMessage& m);
std::string_view message_type(const ClientMessage& m);

WorldInfo make_world_info(const world::MissionConfig& config);
AgentView make_agent_view(const world::AgentState& agent);
StateUpdate make_state_update(const world::WorldState& world);

// True iff at least one human and one AI agent have joined.
bool mission_start_gate(const std::vector<AgentKind>& joined);

}  // namespace hmt::protocol

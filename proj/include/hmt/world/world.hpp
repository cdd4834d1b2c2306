#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmt/common/error.hpp"
#include "hmt/nav/pathfinding.hpp"
#include "hmt/world/config.hpp"
#include "hmt/world/types.hpp"

namespace hmt::world {

// Authoritative mission state. Copyable; step() returns a new value.
struct WorldState {
    std::shared_ptr<const MissionConfig> config;
    std::int64_t tick = 0;
    double clock = 0.0;
    std::vector<Block> grid;  // row-major, y * width + x
    std::vector<AgentState> agents;  // join order
    std::map<Material, int> chest;
    std::map<Voxel, std::string> placed_by;
    bool started = false;
    MissionOutcome outcome;

    int width() const { return config->width; }
    int height() const { return config->height; }
    bool in_bounds(Voxel v) const { return v.x >= 0 && v.y >= 0 && v.x < width() && v.y < height(); }
    const Block& at(Voxel v) const;
    Block& at(Voxel v);

    const AgentState* find_agent(std::string_view id) const;
    AgentState* find_agent(std::string_view id);
    // Throws Error(unknown_agent).
    const AgentState& agent(std::string_view id) const;
    AgentState& agent(std::string_view id);

    bool operator==(const WorldState& o) const;
};

WorldState init_world(const MissionConfig& config);

// Deterministic spawn cell for the `index`-th agent of a kind.
Position spawn_position(const MissionConfig& config, AgentKind kind, int index, std::uint64_t seed);

// Adds an agent standing at `spawn`. Throws Error(join_rejected) on duplicate id.
AgentState& join_agent(WorldState& world, const std::string& id, AgentKind kind, bool can_place,
                       Position spawn);

nav::NavGrid make_nav_grid(const WorldState& world);

struct QueuedAction {
    std::uint64_t seq = 0;
    std::string agent_id;
    ActionRequest request;
};

struct ActionRejection {
    std::string agent_id;
    std::uint64_t seq = 0;
    Errc code = Errc::protocol_violation;
    std::string detail;
};

struct StepResult {
    WorldState world;
    std::vector<ActionRejection> rejections;
};

// Applies requests in (seq, agent id) order, advances movement and mining by
// one tick, then recomputes activity labels and the mission outcome.
// Throws Error(unknown_agent) for a request naming an agent that never joined.
StepResult step(const WorldState& world, std::span<const QueuedAction> actions, double dt);

// Individual operations. Each validates its preconditions and throws Error on
// violation, leaving the world untouched.
void begin_mining(WorldState& world, const std::string& agent_id, Voxel target);
void craft_pickaxe(WorldState& world, const std::string& agent_id);
void chest_transfer(WorldState& world, const std::string& agent_id, ChestDirection direction,
                    const Material& material, int n);
void place_block(WorldState& world, const std::string& agent_id, Voxel target, const Material& material);
void begin_move(WorldState& world, const std::string& agent_id, Voxel target);

double completion_score(const WorldState& world);
int filled_cells(const WorldState& world);

// Requires the mission to have started; returns ongoing otherwise.
MissionOutcome check_termination(const WorldState& world);

// Remaining blocks per material across all towers.
std::map<Material, int> tower_remaining(const WorldState& world);

}  // namespace hmt::world

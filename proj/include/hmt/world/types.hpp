#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hmt/common/geometry.hpp"

namespace hmt::world {

using Material = std::string;

inline constexpr std::string_view kPickaxe = "pickaxe";

enum class BlockKind : std::uint8_t { air, ground, marker, tower_block, crafting_table, chest, placed };

// `material` is set for marker, tower_block and placed. `count` is the
// remaining height of a tower column.
struct Block {
    BlockKind kind = BlockKind::ground;
    Material material;
    int count = 0;

    bool operator==(const Block&) const = default;
};

bool is_solid(const Block& block);

std::string_view to_string(BlockKind kind);
BlockKind block_kind_from_string(std::string_view s);

struct Inventory {
    std::map<Material, int> counts;
    std::set<std::string> tools;

    int count(const Material& m) const;
    int total() const;
    bool has_tool(std::string_view tool) const { return tools.count(std::string(tool)) > 0; }
    void add(const Material& m, int n);
    // Drops zero entries so equal inventories serialize identically.
    void normalize();

    bool operator==(const Inventory&) const = default;
};

enum class AgentKind : std::uint8_t { human, ai };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view s);

// What the agent did during the most recent tick.
enum class ActionKind : std::uint8_t { idle, moving, mining, crafting, placing, storing };

std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view s);

struct ActivityLabel {
    enum class Kind : std::uint8_t { gathering, crafting, building, at_chest, traveling, idle };

    Kind kind = Kind::idle;
    Material material;  // only for gathering

    bool operator==(const ActivityLabel&) const = default;

    static ActivityLabel gathering(Material m) { return {Kind::gathering, std::move(m)}; }
    static ActivityLabel of(Kind k) { return {k, {}}; }
};

// "gathering(wood)", "crafting", ...
std::string to_string(const ActivityLabel& label);
ActivityLabel activity_from_string(std::string_view s);

// Transient per-agent work in progress. Not part of the observable state.
struct AgentTask {
    enum class Kind : std::uint8_t { none, move, mine };

    Kind kind = Kind::none;
    Voxel goal;
    std::vector<Voxel> path;
    size_t next = 0;
    int progress_ticks = 0;
    int required_ticks = 0;

    bool operator==(const AgentTask&) const = default;
};

struct AgentState {
    std::string id;
    AgentKind kind = AgentKind::human;
    Position position;
    Inventory inventory;
    std::string held_item;  // material, tool, or empty for none
    std::optional<Voxel> looking_at;
    ActivityLabel behavior_state;
    ActionKind action = ActionKind::idle;
    bool can_place = true;
    AgentTask task;

    bool operator==(const AgentState&) const = default;
};

struct PlanLayer {
    Material material;
    std::vector<Voxel> cells;

    bool operator==(const PlanLayer&) const = default;
};

struct FloorPlan {
    std::vector<PlanLayer> layers;

    size_t cell_count() const;
    std::optional<Material> required_material(Voxel v) const;
    bool operator==(const FloorPlan&) const = default;
};

struct TowerSpec {
    Voxel at;
    Material material;
    int count = 0;

    bool operator==(const TowerSpec&) const = default;
};

struct SpawnArea {
    Voxel origin;
    int width = 1;
    int height = 1;

    bool operator==(const SpawnArea&) const = default;
};

struct MissionOutcome {
    enum class Status : std::uint8_t { ongoing, success, failure };

    Status status = Status::ongoing;
    std::optional<double> ended_at;
    double final_completion = 0.0;

    bool operator==(const MissionOutcome&) const = default;
};

std::string_view to_string(MissionOutcome::Status status);
MissionOutcome::Status outcome_status_from_string(std::string_view s);

// One request per agent per message. `idle` stops the current task; sending
// nothing lets it continue.
struct MoveTo {
    Voxel target;
    bool operator==(const MoveTo&) const = default;
};
struct Mine {
    Voxel target;
    bool operator==(const Mine&) const = default;
};
struct Craft {
    std::string item;
    bool operator==(const Craft&) const = default;
};
enum class ChestDirection : std::uint8_t { deposit, withdraw };
struct ChestOp {
    ChestDirection direction = ChestDirection::deposit;
    Material material;
    int n = 0;
    bool operator==(const ChestOp&) const = default;
};
struct Place {
    Voxel target;
    Material material;
    bool operator==(const Place&) const = default;
};
struct Idle {
    bool operator==(const Idle&) const = default;
};

using ActionRequest = std::variant<MoveTo, Mine, Craft, ChestOp, Place, Idle>;

std::string_view action_name(const ActionRequest& request);
std::string describe(const ActionRequest& request);

}  // namespace hmt::world

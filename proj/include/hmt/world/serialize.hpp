#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hmt/world/config.hpp"
#include "hmt/world/types.hpp"
#include "hmt/world/world.hpp"

namespace hmt::world {

using nlohmann::json;

json to_json(Voxel v);
Voxel voxel_from_json(const json& j);
json to_json(Position p);
Position position_from_json(const json& j);
json to_json(const Block& b);
Block block_from_json(const json& j);
json to_json(const Inventory& inv);
Inventory inventory_from_json(const json& j);
json to_json(const ActionRequest& a);
ActionRequest action_from_json(const json& j);
json to_json(const MissionOutcome& o);
MissionOutcome outcome_from_json(const json& j);
json to_json(const std::map<Material, int>& counts);
std::map<Material, int> counts_from_json(const json& j);
json to_json(const FloorPlan& plan);
FloorPlan plan_from_json(const json& j);

// Observable agent fields (everything except the transient task).
json observable_agent(const AgentState& agent);
AgentState agent_from_observable(const json& j);

json to_json(const MissionConfig& config);
MissionConfig config_from_json(const json& j);

// Observable state: clock, non-ground blocks, agents, chest, placement
// attribution. Excludes transient tasks. This is the form compared
// between live runs and replay.
json observable_state(const WorldState& world);
std::string serialize_state(const WorldState& world);
// Observable state plus per-agent tasks; used for run-to-run determinism checks.
std::string serialize_full_state(const WorldState& world);

}  // namespace hmt::world

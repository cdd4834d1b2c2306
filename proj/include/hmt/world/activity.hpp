#pragma once

#include <string>
#include <vector>

#include "hmt/world/config.hpp"
#include "hmt/world/types.hpp"

namespace hmt::world {

struct Landmark {
    std::string name;  // "wood_tower", "crafting_table", "chest", "plan_centroid"
    Position position;
    Voxel cell;
    Material material;  // towers only
    bool is_tower = false;
};

// Fixed landmarks of a mission, in a stable order: towers (config order),
// crafting table, chest, plan centroid.
std::vector<Landmark> landmarks_of(const MissionConfig& config);
std::vector<Landmark> landmarks_of(const std::vector<TowerSpec>& towers, Voxel crafting_table, Voxel chest,
                                   const FloorPlan& plan);

// Ordered decision table, first match wins:
//   1. within radius of tower m and mining      -> gathering(m)
//   2. within radius of crafting table, crafting -> crafting
//   3. on or 4-adjacent to a plan cell, holding a material -> building
//   4. within radius of chest                   -> at_chest
//   5. moved this tick                          -> traveling
//   6. otherwise                                -> idle
ActivityLabel classify_activity(const AgentState& agent, const std::vector<Landmark>& landmarks,
                                const FloorPlan& plan, double radius);

}  // namespace hmt::world

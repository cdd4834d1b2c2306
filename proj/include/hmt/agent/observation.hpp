#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmt/nav/pathfinding.hpp"
#include "hmt/protocol/messages.hpp"
#include "hmt/world/activity.hpp"

namespace hmt::agent {

// What an AI agent sees: the static layout from `joined` plus the latest
// broadcast. Pure data; decisions are functions of this alone.
struct Observation {
    std::string self_id;
    protocol::WorldInfo info;
    protocol::StateUpdate update;

    const protocol::AgentView& self() const;  // throws Error(unknown_agent)
};

struct HumanInference {
    world::ActivityLabel activity;
    std::map<std::string, double> proximity;  // landmark name -> distance
};

std::vector<world::Landmark> landmarks_of(const protocol::WorldInfo& info);

HumanInference infer_human_behavior(const protocol::AgentView& human, const std::vector<world::Landmark>& landmarks,
                                    const protocol::WorldInfo& info);

// Solid cells as the agent perceives them: live towers, fixtures, placed blocks.
nav::NavGrid perceived_grid(const Observation& obs);

// Material of the first unfinished layer (last layer once all are done).
world::Material current_layer_material(const Observation& obs);
world::Material next_layer_material(const Observation& obs);

// Unfilled plan cells of `m` minus what the chest and every agent already hold.
int outstanding_demand(const Observation& obs, const world::Material& m);
int tower_stock(const Observation& obs, const world::Material& m);

}  // namespace hmt::agent

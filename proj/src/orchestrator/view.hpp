#pragma once

#include "hmt/agent/observation.hpp"
#include "hmt/nav/pathfinding.hpp"
#include "hmt/protocol/messages.hpp"

namespace hmt::orchestrator {

using protocol::AgentView;
using protocol::TowerStatus;
using world::ActionRequest;

// One agent's view of a state update with the movement helpers shared by the
// scripted brains.
struct View {
    agent::Observation obs;
    const AgentView& self;
    nav::NavGrid grid;

    View(agent::Observation o, const AgentView& s) : obs(std::move(o)), self(s), grid(agent::perceived_grid(obs)) {}

    bool reach(Voxel target) const { return distance(self.position, center_of(target)) <= obs.info.reach + 1e-9; }

    ActionRequest approach(Voxel target) const {
        nav::NavGrid g = grid;
        const Voxel here = self.position.cell();
        if (g.blocked(here)) g.set_blocked(here, false);
        auto path = nav::plan_path_adjacent(g, here, target);
        if (!path) return world::Idle{};
        return world::MoveTo{path->back()};
    }

    ActionRequest mine(const world::Material& m) const {
        const TowerStatus* best = nullptr;
        double best_d = 0;
        for (const auto& t : obs.update.world.towers) {
            if (t.material != m || t.remaining <= 0) continue;
            const double d = distance(self.position, center_of(t.at));
            if (!best || d < best_d) best = &t, best_d = d;
        }
        if (!best) return world::Idle{};
        if (reach(best->at)) return world::Mine{best->at};
        return approach(best->at);
    }

    int chest(const world::Material& m) const {
        auto it = obs.update.world.chest.find(m);
        return it == obs.update.world.chest.end() ? 0 : it->second;
    }
};


}  // namespace hmt::orchestrator

#include "hmt/agent/observation.hpp"

#include "hmt/common/error.hpp"

namespace hmt::agent {

const protocol::AgentView& Observation::self() const {
    for (const auto& a : update.agents)
        if (a.id == self_id) return a;
    throw Error(Errc::unknown_agent, self_id);
}

std::vector<world::Landmark> landmarks_of(const protocol::WorldInfo& info) {
    return world::landmarks_of(info.towers, info.crafting_table, info.chest, info.plan);
}

HumanInference infer_human_behavior(const protocol::AgentView& human, const std::vector<world::Landmark>& landmarks,
                                    const protocol::WorldInfo& info) {
    world::AgentState a;
    a.position = human.position;
    a.action = human.action;
    a.held_item = human.held_item;
    a.looking_at = human.looking_at;
    HumanInference out;
    out.activity = world::classify_activity(a, landmarks, info.plan, info.activity_radius);
    for (const auto& l : landmarks) out.proximity[l.name] = distance(human.position, l.position);
    return out;
}

nav::NavGrid perceived_grid(const Observation& obs) {
    nav::NavGrid grid(obs.info.width, obs.info.height);
    for (const auto& t : obs.update.world.towers)
        if (t.remaining > 0 && grid.in_bounds(t.at)) grid.set_blocked(t.at);
    if (grid.in_bounds(obs.info.crafting_table)) grid.set_blocked(obs.info.crafting_table);
    if (grid.in_bounds(obs.info.chest)) grid.set_blocked(obs.info.chest);
    for (Voxel v : obs.update.world.placed)
        if (grid.in_bounds(v)) grid.set_blocked(v);
    return grid;
}

namespace {

int current_layer_index(const Observation& obs) {
    const auto& layers = obs.update.world.layers;
    for (size_t i = 0; i < layers.size(); ++i)
        if (layers[i].filled < layers[i].total) return static_cast<int>(i);
    return static_cast<int>(layers.size()) - 1;
}

}  // namespace

world::Material current_layer_material(const Observation& obs) {
    const int i = current_layer_index(obs);
    return i < 0 ? world::Material{} : obs.update.world.layers[static_cast<size_t>(i)].material;
}

world::Material next_layer_material(const Observation& obs) {
    const auto& layers = obs.update.world.layers;
    const int i = current_layer_index(obs);
    if (i < 0) return {};
    const size_t next = std::min(layers.size() - 1, static_cast<size_t>(i) + 1);
    return layers[next].material;
}

int outstanding_demand(const Observation& obs, const world::Material& m) {
    int demand = 0;
    for (const auto& l : obs.update.world.layers)
        if (l.material == m) demand += l.total - l.filled;
    if (auto it = obs.update.world.chest.find(m); it != obs.update.world.chest.end()) demand -= it->second;
    for (const auto& a : obs.update.agents) demand -= a.inventory.count(m);
    return demand;
}

int tower_stock(const Observation& obs, const world::Material& m) {
    int n = 0;
    for (const auto& t : obs.update.world.towers)
        if (t.material == m) n += t.remaining;
    return n;
}

}  // namespace hmt::agent

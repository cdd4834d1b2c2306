#include "hmt/world/activity.hpp"

#include <limits>

namespace hmt::world {

std::vector<Landmark> landmarks_of(const MissionConfig& config) {
    return landmarks_of(config.towers, config.crafting_table, config.chest, config.plan);
}

std::vector<Landmark> landmarks_of(const std::vector<TowerSpec>& towers, Voxel crafting_table, Voxel chest,
                                   const FloorPlan& plan) {
    std::vector<Landmark> out;
    std::map<Material, int> seen;
    for (const auto& t : towers) {
        const int n = ++seen[t.material];
        Landmark l;
        l.name = t.material + "_tower" + (n > 1 ? "_" + std::to_string(n) : "");
        l.position = center_of(t.at);
        l.cell = t.at;
        l.material = t.material;
        l.is_tower = true;
        out.push_back(std::move(l));
    }
    out.push_back({"crafting_table", center_of(crafting_table), crafting_table, {}, false});
    out.push_back({"chest", center_of(chest), chest, {}, false});

    double sx = 0, sy = 0;
    size_t n = 0;
    for (const auto& layer : plan.layers)
        for (const auto& c : layer.cells) {
            sx += c.x + 0.5;
            sy += c.y + 0.5;
            ++n;
        }
    Position centroid = n ? Position{sx / static_cast<double>(n), sy / static_cast<double>(n)} : Position{};
    out.push_back({"plan_centroid", centroid, centroid.cell(), {}, false});
    return out;
}

namespace {

bool holds_material(const AgentState& a) { return !a.held_item.empty() && a.held_item != kPickaxe; }

bool on_or_adjacent_to_plan(const AgentState& a, const FloorPlan& plan) {
    const Voxel c = a.position.cell();
    for (const auto& layer : plan.layers)
        for (const auto& cell : layer.cells)
            if (manhattan(cell, c) <= 1) return true;
    return false;
}

}  // namespace

ActivityLabel classify_activity(const AgentState& agent, const std::vector<Landmark>& landmarks,
                                const FloorPlan& plan, double radius) {
    using K = ActivityLabel::Kind;
    if (agent.action == ActionKind::mining) {
        // Prefer the tower actually being mined, else the nearest one in range.
        const Landmark* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& l : landmarks) {
            if (!l.is_tower) continue;
            const double d = distance(agent.position, l.position);
            if (d > radius) continue;
            if (agent.looking_at && *agent.looking_at == l.cell) {
                best = &l;
                break;
            }
            if (d < best_d) {
                best_d = d;
                best = &l;
            }
        }
        if (best) return ActivityLabel::gathering(best->material);
    }
    auto near = [&](std::string_view name) {
        for (const auto& l : landmarks)
            if (l.name == name) return distance(agent.position, l.position) <= radius;
        return false;
    };
    if (agent.action == ActionKind::crafting && near("crafting_table")) return ActivityLabel::of(K::crafting);
    if (holds_material(agent) && on_or_adjacent_to_plan(agent, plan)) return ActivityLabel::of(K::building);
    if (near("chest")) return ActivityLabel::of(K::at_chest);
    if (agent.action == ActionKind::moving) return ActivityLabel::of(K::traveling);
    return ActivityLabel::of(K::idle);
}

}  // namespace hmt::world

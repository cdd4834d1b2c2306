#include "hmt/agent/dt_agent.hpp"

#include "hmt/common/error.hpp"

namespace hmt::agent {

namespace {

using world::ActionRequest;
using world::Material;

struct Context {
    const Observation& obs;
    const protocol::AgentView& self;
    std::vector<world::Landmark> landmarks;
    std::vector<HumanInference> humans;

    explicit Context(const Observation& o) : obs(o), self(o.self()), landmarks(landmarks_of(o.info)) {
        for (const auto& a : o.update.agents)
            if (a.kind == world::AgentKind::human) humans.push_back(infer_human_behavior(a, landmarks, o.info));
    }

    bool human_gathers(const Material& m) const {
        for (const auto& h : humans)
            if (h.activity.kind == world::ActivityLabel::Kind::gathering && h.activity.material == m) return true;
        return false;
    }

    // First layer material, from the current layer onward, that is still
    // short and that no human is already gathering.
    Material complement() const {
        const auto& layers = obs.update.world.layers;
        const Material current = current_layer_material(obs);
        bool reached = false;
        for (const auto& l : layers) {
            reached |= l.material == current;
            if (!reached) continue;
            if (outstanding_demand(obs, l.material) > 0 && tower_stock(obs, l.material) > 0 && !human_gathers(l.material))
                return l.material;
        }
        return current;
    }

    // Empty result for the "any" selector.
    Material resolve(const MaterialSelector& s) const {
        switch (s.kind) {
            case MaterialSelector::Kind::literal: return s.material;
            case MaterialSelector::Kind::current_layer: return current_layer_material(obs);
            case MaterialSelector::Kind::next_layer: return next_layer_material(obs);
            case MaterialSelector::Kind::complement: return complement();
            case MaterialSelector::Kind::any: return {};
        }
        return {};
    }

    const world::Landmark* landmark(const std::string& name) const {
        for (const auto& l : landmarks)
            if (l.name == name) return &l;
        return nullptr;
    }

    bool within_reach(Voxel target) const {
        return distance(self.position, center_of(target)) <= obs.info.reach + 1e-9;
    }

    // Walk to the closest free neighbour of a solid fixture.
    ActionRequest approach(Voxel target) const {
        const auto grid = perceived_grid(obs);
        const Voxel here = self.position.cell();
        if (!grid.in_bounds(here) || !grid.in_bounds(target)) return world::Idle{};
        nav::NavGrid g = grid;
        if (g.blocked(here)) g.set_blocked(here, false);
        auto path = nav::plan_path_adjacent(g, here, target);
        if (!path) return world::Idle{};
        return world::MoveTo{path->back()};
    }
};

bool evaluate(const Context& c, const PolicyNode& n) {
    const auto& obs = c.obs;
    const auto& inv = c.self.inventory;
    switch (n.predicate) {
        case PredicateKind::mission_complete: return obs.update.world.completion >= 1.0;
        case PredicateKind::has_pickaxe: return inv.has_tool(world::kPickaxe);
        case PredicateKind::can_craft_pickaxe: return inv.count(obs.info.pickaxe_material) >= obs.info.pickaxe_cost;
        case PredicateKind::inventory_full: return inv.total() >= obs.info.inventory_capacity;
        case PredicateKind::human_gathering: {
            if (n.material.kind == MaterialSelector::Kind::any) {
                for (const auto& h : c.humans)
                    if (h.activity.kind == world::ActivityLabel::Kind::gathering) return true;
                return false;
            }
            return c.human_gathers(c.resolve(n.material));
        }
        case PredicateKind::carrying_at_least: {
            const Material m = c.resolve(n.material);
            return (m.empty() ? inv.total() : inv.count(m)) >= n.n;
        }
        case PredicateKind::chest_below: {
            const Material m = c.resolve(n.material);
            int stored = 0;
            for (const auto& [k, v] : obs.update.world.chest)
                if (m.empty() || k == m) stored += v;
            return stored < n.n;
        }
        case PredicateKind::material_needed: {
            if (n.material.kind == MaterialSelector::Kind::any) {
                for (const auto& l : obs.update.world.layers)
                    if (outstanding_demand(obs, l.material) > 0 && tower_stock(obs, l.material) > 0) return true;
                return false;
            }
            const Material m = c.resolve(n.material);
            return outstanding_demand(obs, m) > 0 && tower_stock(obs, m) > 0;
        }
        case PredicateKind::near: {
            const auto* l = c.landmark(n.landmark);
            return l && distance(c.self.position, l->position) <= obs.info.activity_radius;
        }
    }
    return false;
}

ActionRequest run_skill(const Context& c, const PolicyNode& n) {
    const auto& obs = c.obs;
    const auto& inv = c.self.inventory;
    switch (n.skill) {
        case SkillKind::idle: return world::Idle{};
        case SkillKind::gather: {
            const Material m = c.resolve(n.material);
            if (inv.total() >= obs.info.inventory_capacity) return world::Idle{};
            // Nearest live tower of the material; ties keep config order.
            const protocol::TowerStatus* best = nullptr;
            double best_d = 0.0;
            for (const auto& t : obs.update.world.towers) {
                if (t.material != m || t.remaining <= 0) continue;
                const double d = distance(c.self.position, center_of(t.at));
                if (!best || d < best_d) best = &t, best_d = d;
            }
            if (!best) return world::Idle{};
            if (c.within_reach(best->at)) return world::Mine{best->at};
            return c.approach(best->at);
        }
        case SkillKind::craft_pickaxe: {
            if (inv.has_tool(world::kPickaxe)) return world::Idle{};
            if (c.within_reach(obs.info.crafting_table)) return world::Craft{std::string(world::kPickaxe)};
            return c.approach(obs.info.crafting_table);
        }
        case SkillKind::deposit: {
            Material m = c.resolve(n.material);
            if (m.empty()) {
                for (const auto& [k, v] : inv.counts)
                    if (v > 0) {
                        m = k;
                        break;
                    }
            }
            const int count = m.empty() ? 0 : inv.count(m);
            if (count == 0) return world::Idle{};
            if (c.within_reach(obs.info.chest)) return world::ChestOp{world::ChestDirection::deposit, m, count};
            return c.approach(obs.info.chest);
        }
        case SkillKind::go_to: {
            const auto* l = c.landmark(n.landmark);
            if (!l || distance(c.self.position, l->position) <= obs.info.activity_radius) return world::Idle{};
            return c.approach(l->cell);
        }
    }
    return world::Idle{};
}

}  // namespace

Decision decide(const DecisionTreePolicy& policy, const Observation& obs) {
    const Context c(obs);
    Decision d;
    d.trace.sim_time = obs.update.world.clock;
    d.trace.phase = current_phase(obs.update.world.completion, policy.thresholds);
    const PolicyTree& tree = policy.phases[static_cast<size_t>(d.trace.phase - 1)];
    int index = 0;
    while (true) {
        const PolicyNode& node = tree.nodes.at(static_cast<size_t>(index));
        if (node.leaf) {
            d.trace.selected_node = node.name;
            d.action = run_skill(c, node);
            break;
        }
        const bool result = evaluate(c, node);
        d.trace.active_branch.push_back({node.name, result});
        index = result ? node.on_true : node.on_false;
    }
    // Skills never produce placements; the guard keeps the property explicit.
    if (std::holds_alternative<world::Place>(d.action)) d.action = world::Idle{};
    d.trace.emitted_action = d.action;
    return d;
}

bool is_valid_branch(const DecisionTreePolicy& policy, const DecisionTrace& trace) {
    if (trace.phase < 1 || trace.phase > 5) return false;
    const PolicyTree& tree = policy.phases[static_cast<size_t>(trace.phase - 1)];
    if (tree.nodes.empty()) return false;
    int index = 0;
    for (const auto& step : trace.active_branch) {
        const PolicyNode& n = tree.nodes[static_cast<size_t>(index)];
        if (n.leaf || n.name != step.node) return false;
        index = step.result ? n.on_true : n.on_false;
    }
    const PolicyNode& leaf = tree.nodes[static_cast<size_t>(index)];
    return leaf.leaf && leaf.name == trace.selected_node;
}

DtAgentRuntime::DtAgentRuntime(DecisionTreePolicy policy, std::string self_id)
    : policy_(std::move(policy)), self_id_(std::move(self_id)) {}

void DtAgentRuntime::on_joined(const protocol::Joined& joined) {
    self_id_ = joined.agent_id;
    if (joined.world_info) info_ = joined.world_info;
}

std::optional<Decision> DtAgentRuntime::on_state_update(const protocol::StateUpdate& update) {
    if (!info_) return std::nullopt;
    const protocol::AgentView* self = nullptr;
    for (const auto& a : update.agents)
        if (a.id == self_id_) self = &a;
    if (!self) return std::nullopt;
    const double now = update.world.clock;

    if (awaiting_ack_) {
        if (self->action != world::ActionKind::idle || now >= ack_deadline_) awaiting_ack_ = false;
        else return std::nullopt;
    }
    if (self->action == world::ActionKind::moving || self->action == world::ActionKind::mining) return std::nullopt;
    if (now < hold_until_) return std::nullopt;

    Observation obs{self_id_, *info_, update};
    Decision d = decide(policy_, obs);
    ++decisions_;
    if (std::holds_alternative<world::Idle>(d.action)) {
        hold_until_ = now + kRecheckSeconds;
    } else {
        awaiting_ack_ = true;
        ack_deadline_ = now + kRecheckSeconds;
    }
    return d;
}

void DtAgentRuntime::on_error(const protocol::ErrorNotice& error, double sim_time) {
    // Departures of other agents are informational, not a rejection of ours.
    if (error.code == "agent_left") return;
    awaiting_ack_ = false;
    hold_until_ = sim_time + kRecheckSeconds;
}

}  // namespace hmt::agent

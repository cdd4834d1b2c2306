#include "hmt/orchestrator/brains.hpp"

#include <algorithm>
#include <set>

#include "hmt/agent/observation.hpp"
#include "view.hpp"

namespace hmt::orchestrator {

using namespace hmt::protocol;
using world::ActionRequest;

DtBrain::DtBrain(agent::DecisionTreePolicy policy, std::string id) : runtime_(std::move(policy), std::move(id)) {}

Join DtBrain::join_request() const { return {runtime_.id(), world::AgentKind::ai, false}; }

std::vector<ClientMessage> DtBrain::on_message(const ServerMessage& msg, double sim_time) {
    if (const auto* j = std::get_if<Joined>(&msg)) {
        runtime_.on_joined(*j);
    } else if (const auto* u = std::get_if<StateUpdate>(&msg)) {
        if (auto d = runtime_.on_state_update(*u)) return {ActionMsg{d->action}, TraceMsg{d->trace}};
    } else if (const auto* e = std::get_if<ErrorNotice>(&msg)) {
        runtime_.on_error(*e, sim_time);
    }
    return {};
}

ScriptedHuman::ScriptedHuman(std::string id) : id_(std::move(id)) {}

Join ScriptedHuman::join_request() const { return {id_, world::AgentKind::human, true}; }

std::vector<ClientMessage> ScriptedHuman::on_message(const ServerMessage& msg, double sim_time) {
    if (const auto* j = std::get_if<Joined>(&msg)) {
        id_ = j->agent_id;
        info_ = j->world_info;
    } else if (const auto* u = std::get_if<StateUpdate>(&msg)) {
        std::vector<ClientMessage> out;
        if (!commands_sent_) {
            commands_sent_ = true;
            for (const auto& c : commands_) out.push_back(ChatSend{c});
        }
        if (auto a = decide(*u)) out.push_back(ActionMsg{*a});
        return out;
    } else if (std::holds_alternative<ErrorNotice>(msg)) {
        const auto& e = std::get<ErrorNotice>(msg);
        if (e.code != "agent_left") {
            awaiting_ack_ = false;
            hold_until_ = sim_time + 0.5;
        }
    }
    return {};
}


std::optional<ActionRequest> ScriptedHuman::decide(const StateUpdate& update) {
    if (!info_) return std::nullopt;
    const AgentView* self = nullptr;
    for (const auto& a : update.agents)
        if (a.id == id_) self = &a;
    if (!self || update.world.completion >= 1.0) return std::nullopt;
    const double now = update.world.clock;

    if (awaiting_ack_) {
        if (self->action != world::ActionKind::idle || now >= ack_deadline_) awaiting_ack_ = false;
        else return std::nullopt;
    }
    if (self->action == world::ActionKind::moving || self->action == world::ActionKind::mining) return std::nullopt;
    if (now < hold_until_) return std::nullopt;

    const View v(agent::Observation{id_, *info_, update}, *self);
    const auto& info = *info_;
    const auto& inv = self->inventory;

    auto choose = [&]() -> ActionRequest {
        if (!inv.has_tool(world::kPickaxe)) {
            const int wood = inv.count(info.pickaxe_material);
            if (wood >= info.pickaxe_cost) return v.reach(info.crafting_table) ? ActionRequest(world::Craft{"pickaxe"})
                                                                             : v.approach(info.crafting_table);
            const int missing = info.pickaxe_cost - wood;
            if (v.chest(info.pickaxe_material) >= missing)
                return v.reach(info.chest) ? ActionRequest(world::ChestOp{world::ChestDirection::withdraw,
                                                                          info.pickaxe_material, missing})
                                           : v.approach(info.chest);
            return v.mine(info.pickaxe_material);
        }

        // Current layer and its unfilled cells in row-major order.
        std::set<Voxel> placed(update.world.placed.begin(), update.world.placed.end());
        const world::PlanLayer* layer = nullptr;
        std::vector<Voxel> unfilled;
        for (const auto& l : info.plan.layers) {
            for (Voxel c : l.cells)
                if (!placed.count(c)) unfilled.push_back(c);
            if (!unfilled.empty()) {
                layer = &l;
                break;
            }
        }
        if (!layer) return world::Idle{};
        std::sort(unfilled.begin(), unfilled.end(),
                  [](Voxel a, Voxel b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
        const world::Material& m = layer->material;
        const int have = inv.count(m);
        const int remaining = static_cast<int>(unfilled.size());

        if (mode_ == Mode::build && have == 0) mode_ = Mode::gather;
        if (mode_ == Mode::gather) {
            if (have >= std::min(remaining, kMineBatch)) {
                mode_ = Mode::build;
            } else if (const int stocked = v.chest(m); stocked > 0 && stocked >= std::min(remaining, kMineBatch) - have) {
                if (!v.reach(info.chest)) return v.approach(info.chest);
                const int room = info.inventory_capacity - inv.total();
                const int n = std::min({stocked, remaining - have, room});
                if (n <= 0) {
                    mode_ = Mode::build;
                } else {
                    mode_ = Mode::build;
                    return world::ChestOp{world::ChestDirection::withdraw, m, n};
                }
            } else {
                return v.mine(m);
            }
        }

        // Build: the first cell nobody else is standing on.
        const Voxel here = self->position.cell();
        const Voxel* target = nullptr;
        for (const Voxel& c : unfilled) {
            bool taken = false;
            for (const auto& a : update.agents)
                if (a.id != id_ && a.position.cell() == c) taken = true;
            if (!taken) {
                target = &c;
                break;
            }
        }
        if (!target) return world::Idle{};
        if (here != *target && v.reach(*target)) return world::Place{*target, m};

        // Stand south of the target when possible so finished rows stay behind us.
        const Voxel t = *target;
        const Voxel candidates[] = {{t.x, t.y + 1},     {t.x - 1, t.y + 1}, {t.x + 1, t.y + 1}, {t.x - 1, t.y},
                                    {t.x + 1, t.y},     {t.x, t.y - 1},     {t.x - 1, t.y - 1}, {t.x + 1, t.y - 1}};
        nav::NavGrid g = v.grid;
        if (g.in_bounds(here) && g.blocked(here)) g.set_blocked(here, false);
        for (const Voxel& c : candidates) {
            if (!g.walkable(c) || distance(center_of(c), center_of(t)) > info.reach + 1e-9) continue;
            if (g.in_bounds(here) && nav::plan_path(g, here, c)) return world::MoveTo{c};
        }
        return world::Idle{};
    };

    const ActionRequest action = choose();
    if (std::holds_alternative<world::Idle>(action)) {
        hold_until_ = now + 0.5;
        return std::nullopt;
    }
    awaiting_ack_ = true;
    ack_deadline_ = now + 0.5;
    return action;
}

}  // namespace hmt::orchestrator

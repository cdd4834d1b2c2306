#include "hmt/protocol/messages.hpp"

#include "hmt/agent/phase.hpp"

namespace hmt::protocol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view message_type(const ServerMessage& m) {
    return std::visit(Overloaded{[](const Joined&) { return std::string_view("joined"); },
                                 [](const StateUpdate&) { return std::string_view("state_update"); },
                                 [](const ChatRelay&) { return std::string_view("chat"); },
                                 [](const MissionEnd&) { return std::string_view("mission_end"); },
                                 [](const ErrorNotice&) { return std::string_view("error"); }},
                      m);
}

std::string_view message_type(const ClientMessage& m) {
    return std::visit(Overloaded{[](const Join&) { return std::string_view("join"); },
                                 [](const ActionMsg&) { return std::string_view("action"); },
                                 [](const ChatSend&) { return std::string_view("chat"); },
                                 [](const TraceMsg&) { return std::string_view("trace"); },
                                 [](const Disconnect&) { return std::string_view("disconnect"); }},
                      m);
}

WorldInfo make_world_info(const world::MissionConfig& c) {
    WorldInfo w;
    w.width = c.width;
    w.height = c.height;
    w.towers = c.towers;
    w.crafting_table = c.crafting_table;
    w.chest = c.chest;
    w.plan = c.plan;
    w.reach = c.reach;
    w.agent_speed = c.agent_speed;
    w.activity_radius = c.activity_radius;
    w.inventory_capacity = c.inventory_capacity;
    w.pickaxe_cost = c.pickaxe_cost;
    w.pickaxe_material = c.pickaxe_material;
    w.time_limit_s = c.time_limit_s;
    w.tick_rate_hz = c.tick_rate_hz;
    return w;
}

AgentView make_agent_view(const world::AgentState& a) {
    return {a.id, a.kind, a.position, a.inventory, a.held_item, a.looking_at, a.behavior_state, a.action, a.can_place};
}

StateUpdate make_state_update(const world::WorldState& w) {
    StateUpdate u;
    for (const auto& a : w.agents) u.agents.push_back(make_agent_view(a));
    const auto& c = *w.config;
    u.world.completion = world::completion_score(w);
    u.world.clock = w.clock;
    u.world.phase = agent::current_phase(u.world.completion, agent::PhaseThresholds(c.phase_thresholds));
    u.world.chest = w.chest;
    for (const auto& t : c.towers) u.world.towers.push_back({t.at, t.material, w.at(t.at).count});
    for (const auto& layer : c.plan.layers) {
        LayerStatus s{layer.material, 0, static_cast<int>(layer.cells.size())};
        for (Voxel v : layer.cells)
            if (w.at(v).kind == world::BlockKind::placed) ++s.filled;
        u.world.layers.push_back(s);
    }
    for (const auto& [v, id] : w.placed_by) u.world.placed.push_back(v);
    return u;
}

bool mission_start_gate(const std::vector<AgentKind>& joined) {
    bool human = false, ai = false;
    for (AgentKind k : joined) {
        human |= k == AgentKind::human;
        ai |= k == AgentKind::ai;
    }
    return human && ai;
}

}  // namespace hmt::protocol

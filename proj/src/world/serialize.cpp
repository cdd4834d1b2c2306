#include "hmt/world/serialize.hpp"

#include "hmt/common/error.hpp"
#include "hmt/common/json_util.hpp"

namespace hmt::world {

using namespace hmt::jsonu;

json to_json(Voxel v) { return {{"x", v.x}, {"y", v.y}}; }

Voxel voxel_from_json(const json& j) {
    return {static_cast<int>(get_int(j, "x")), static_cast<int>(get_int(j, "y"))};
}

json to_json(Position p) { return {{"x", p.x}, {"y", p.y}}; }

Position position_from_json(const json& j) { return {get_number(j, "x"), get_number(j, "y")}; }

json to_json(const Block& b) {
    json j{{"kind", to_string(b.kind)}};
    if (!b.material.empty()) j["material"] = b.material;
    if (b.kind == BlockKind::tower_block) j["count"] = b.count;
    return j;
}

Block block_from_json(const json& j) {
    Block b;
    b.kind = block_kind_from_string(get_string(j, "kind"));
    if (optional_field(j, "material")) b.material = get_string(j, "material");
    if (optional_field(j, "count")) b.count = static_cast<int>(get_int(j, "count"));
    return b;
}

json to_json(const std::map<Material, int>& counts) {
    json j = json::object();
    for (const auto& [m, n] : counts) j[m] = n;
    return j;
}

std::map<Material, int> counts_from_json(const json& j) {
    expect_object(j, "counts");
    std::map<Material, int> out;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            throw Error(Errc::schema_invalid, "count for '" + k + "' must be a non-negative integer");
        out[k] = v.get<int>();
    }
    return out;
}

json to_json(const Inventory& inv) {
    json tools = json::array();
    for (const auto& t : inv.tools) tools.push_back(t);
    return {{"counts", to_json(inv.counts)}, {"tools", tools}};
}

Inventory inventory_from_json(const json& j) {
    Inventory inv;
    inv.counts = counts_from_json(field(j, "counts"));
    const json& tools = field(j, "tools");
    expect_array(tools, "tools");
    for (const auto& t : tools) {
        if (!t.is_string()) throw Error(Errc::schema_invalid, "tool names must be strings");
        inv.tools.insert(t.get<std::string>());
    }
    inv.normalize();
    return inv;
}

json to_json(const ActionRequest& a) {
    struct Visitor {
        json operator()(const MoveTo& m) const { return {{"kind", "move_to"}, {"target", to_json(m.target)}}; }
        json operator()(const Mine& m) const { return {{"kind", "mine"}, {"target", to_json(m.target)}}; }
        json operator()(const Craft& c) const { return {{"kind", "craft"}, {"item", c.item}}; }
        json operator()(const ChestOp& c) const {
            return {{"kind", "chest"},
                    {"direction", c.direction == ChestDirection::deposit ? "deposit" : "withdraw"},
                    {"material", c.material},
                    {"n", c.n}};
        }
        json operator()(const Place& p) const {
            return {{"kind", "place"}, {"target", to_json(p.target)}, {"material", p.material}};
        }
        json operator()(const Idle&) const { return {{"kind", "idle"}}; }
    };
    return std::visit(Visitor{}, a);
}

ActionRequest action_from_json(const json& j) {
    const std::string kind = get_string(j, "kind");
    if (kind == "move_to") return MoveTo{voxel_from_json(field(j, "target"))};
    if (kind == "mine") return Mine{voxel_from_json(field(j, "target"))};
    if (kind == "craft") return Craft{get_string(j, "item")};
    if (kind == "chest") {
        ChestOp c;
        const std::string dir = get_string(j, "direction");
        if (dir == "deposit") c.direction = ChestDirection::deposit;
        else if (dir == "withdraw") c.direction = ChestDirection::withdraw;
        else throw Error(Errc::unknown_variant, "chest direction '" + dir + "'");
        c.material = get_string(j, "material");
        c.n = static_cast<int>(get_int(j, "n"));
        return c;
    }
    if (kind == "place") return Place{voxel_from_json(field(j, "target")), get_string(j, "material")};
    if (kind == "idle") return Idle{};
    throw Error(Errc::unknown_variant, "action kind '" + kind + "'");
}

json to_json(const MissionOutcome& o) {
    json j{{"status", to_string(o.status)}, {"final_completion", o.final_completion}};
    j["ended_at"] = o.ended_at ? json(*o.ended_at) : json(nullptr);
    return j;
}

MissionOutcome outcome_from_json(const json& j) {
    MissionOutcome o;
    o.status = outcome_status_from_string(get_string(j, "status"));
    o.final_completion = get_number(j, "final_completion");
    const json& e = field(j, "ended_at");
    if (!e.is_null()) {
        if (!e.is_number()) throw Error(Errc::schema_invalid, "'ended_at' must be a number or null");
        o.ended_at = e.get<double>();
    }
    return o;
}

json to_json(const FloorPlan& plan) {
    json layers = json::array();
    for (const auto& layer : plan.layers) {
        json cells = json::array();
        for (const auto& c : layer.cells) cells.push_back(to_json(c));
        layers.push_back({{"material", layer.material}, {"cells", cells}});
    }
    return layers;
}

FloorPlan plan_from_json(const json& j) {
    expect_array(j, "plan");
    FloorPlan plan;
    for (const auto& l : j) {
        PlanLayer layer;
        layer.material = get_string(l, "material");
        const json& cells = field(l, "cells");
        expect_array(cells, "cells");
        for (const auto& c : cells) layer.cells.push_back(voxel_from_json(c));
        plan.layers.push_back(std::move(layer));
    }
    return plan;
}

json observable_agent(const AgentState& a) {
    return {{"id", a.id},
            {"kind", to_string(a.kind)},
            {"position", to_json(a.position)},
            {"inventory", to_json(a.inventory)},
            {"held_item", a.held_item.empty() ? json(nullptr) : json(a.held_item)},
            {"looking_at", a.looking_at ? to_json(*a.looking_at) : json(nullptr)},
            {"behavior_state", to_string(a.behavior_state)},
            {"action", to_string(a.action)},
            {"can_place", a.can_place}};
}

AgentState agent_from_observable(const json& j) {
    AgentState a;
    a.id = get_string(j, "id");
    a.kind = agent_kind_from_string(get_string(j, "kind"));
    a.position = position_from_json(field(j, "position"));
    a.inventory = inventory_from_json(field(j, "inventory"));
    const json& held = field(j, "held_item");
    a.held_item = held.is_null() ? std::string() : get_string(j, "held_item");
    const json& look = field(j, "looking_at");
    if (!look.is_null()) a.looking_at = voxel_from_json(look);
    a.behavior_state = activity_from_string(get_string(j, "behavior_state"));
    a.action = action_kind_from_string(get_string(j, "action"));
    a.can_place = get_bool(j, "can_place");
    return a;
}

namespace {

json spawn_json(const SpawnArea& a) {
    return {{"origin", to_json(a.origin)}, {"width", a.width}, {"height", a.height}};
}

SpawnArea spawn_from_json(const json& j) {
    return {voxel_from_json(field(j, "origin")), static_cast<int>(get_int(j, "width")),
            static_cast<int>(get_int(j, "height"))};
}

}  // namespace

json to_json(const MissionConfig& c) {
    json towers = json::array();
    for (const auto& t : c.towers) towers.push_back({{"at", to_json(t.at)}, {"material", t.material}, {"count", t.count}});
    json durations = json::object();
    for (const auto& [m, d] : c.mining_duration_s) durations[m] = d;
    return {{"name", c.name},
            {"width", c.width},
            {"height", c.height},
            {"plan", to_json(c.plan)},
            {"towers", towers},
            {"crafting_table", to_json(c.crafting_table)},
            {"chest", to_json(c.chest)},
            {"chest_capacity", c.chest_capacity},
            {"time_limit_s", c.time_limit_s},
            {"tick_rate_hz", c.tick_rate_hz},
            {"seed", c.seed},
            {"mining_duration_s", durations},
            {"pickaxe_speedup", c.pickaxe_speedup},
            {"pickaxe_cost", c.pickaxe_cost},
            {"pickaxe_material", c.pickaxe_material},
            {"reach", c.reach},
            {"agent_speed", c.agent_speed},
            {"inventory_capacity", c.inventory_capacity},
            {"collaboration_multiplier", c.collaboration_multiplier},
            {"require_collaboration", c.require_collaboration},
            {"human_spawn", spawn_json(c.human_spawn)},
            {"ai_spawn", spawn_json(c.ai_spawn)},
            {"phase_thresholds", c.phase_thresholds},
            {"activity_radius", c.activity_radius},
            {"position_gate", c.position_gate},
            {"broadcast_every_ticks", c.broadcast_every_ticks},
            {"view_radius", c.view_radius},
            {"cell_px", c.cell_px}};
}

MissionConfig config_from_json(const json& j) {
    MissionConfig c;
    c.name = get_string(j, "name");
    c.width = static_cast<int>(get_int(j, "width"));
    c.height = static_cast<int>(get_int(j, "height"));
    c.plan = plan_from_json(field(j, "plan"));
    c.towers.clear();
    for (const auto& t : field(j, "towers"))
        c.towers.push_back({voxel_from_json(field(t, "at")), get_string(t, "material"),
                            static_cast<int>(get_int(t, "count"))});
    c.crafting_table = voxel_from_json(field(j, "crafting_table"));
    c.chest = voxel_from_json(field(j, "chest"));
    c.chest_capacity = static_cast<int>(get_int(j, "chest_capacity"));
    c.time_limit_s = get_number(j, "time_limit_s");
    c.tick_rate_hz = get_number(j, "tick_rate_hz");
    const json& seed = field(j, "seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw Error(Errc::schema_invalid, "'seed' must be an integer");
    c.seed = seed.get<std::uint64_t>();
    c.mining_duration_s.clear();
    const json& durations = field(j, "mining_duration_s");
    expect_object(durations, "mining_duration_s");
    for (const auto& [m, d] : durations.items()) {
        if (!d.is_number()) throw Error(Errc::schema_invalid, "mining duration must be a number");
        c.mining_duration_s[m] = d.get<double>();
    }
    c.pickaxe_speedup = get_number(j, "pickaxe_speedup");
    c.pickaxe_cost = static_cast<int>(get_int(j, "pickaxe_cost"));
    c.pickaxe_material = get_string(j, "pickaxe_material");
    c.reach = get_number(j, "reach");
    c.agent_speed = get_number(j, "agent_speed");
    c.inventory_capacity = static_cast<int>(get_int(j, "inventory_capacity"));
    c.collaboration_multiplier = get_number(j, "collaboration_multiplier");
    c.require_collaboration = get_bool(j, "require_collaboration");
    c.human_spawn = spawn_from_json(field(j, "human_spawn"));
    c.ai_spawn = spawn_from_json(field(j, "ai_spawn"));
    c.phase_thresholds.clear();
    for (const auto& t : field(j, "phase_thresholds")) {
        if (!t.is_number()) throw Error(Errc::schema_invalid, "phase thresholds must be numbers");
        c.phase_thresholds.push_back(t.get<double>());
    }
    c.activity_radius = get_number(j, "activity_radius");
    c.position_gate = get_number(j, "position_gate");
    c.broadcast_every_ticks = static_cast<int>(get_int(j, "broadcast_every_ticks"));
    c.view_radius = static_cast<int>(get_int(j, "view_radius"));
    c.cell_px = static_cast<int>(get_int(j, "cell_px"));
    return c;
}

json observable_state(const WorldState& w) {
    json blocks = json::array();
    for (int y = 0; y < w.height(); ++y)
        for (int x = 0; x < w.width(); ++x) {
            const Block& b = w.at({x, y});
            if (b.kind == BlockKind::ground) continue;
            json e = to_json(b);
            e["x"] = x;
            e["y"] = y;
            blocks.push_back(std::move(e));
        }
    json agents = json::array();
    for (const auto& a : w.agents) agents.push_back(observable_agent(a));
    json placed = json::array();
    for (const auto& [v, id] : w.placed_by) placed.push_back({{"x", v.x}, {"y", v.y}, {"agent", id}});
    return {{"clock", w.clock},
            {"tick", w.tick},
            {"blocks", blocks},
            {"agents", agents},
            {"chest", to_json(w.chest)},
            {"placed_by", placed}};
}

std::string serialize_state(const WorldState& world) { return observable_state(world).dump(); }

std::string serialize_full_state(const WorldState& world) {
    json j = observable_state(world);
    json tasks = json::array();
    for (const auto& a : world.agents) {
        json path = json::array();
        for (const auto& c : a.task.path) path.push_back(to_json(c));
        tasks.push_back({{"agent", a.id},
                         {"kind", static_cast<int>(a.task.kind)},
                         {"goal", to_json(a.task.goal)},
                         {"path", path},
                         {"next", a.task.next},
                         {"progress_ticks", a.task.progress_ticks},
                         {"required_ticks", a.task.required_ticks}});
    }
    j["tasks"] = tasks;
    j["outcome"] = to_json(world.outcome);
    j["started"] = world.started;
    return j.dump();
}

}  // namespace hmt::world

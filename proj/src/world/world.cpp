#include "hmt/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hmt/world/activity.hpp"

namespace hmt::world {

const Block& WorldState::at(Voxel v) const { return grid[static_cast<size_t>(v.y) * width() + v.x]; }
Block& WorldState::at(Voxel v) { return grid[static_cast<size_t>(v.y) * width() + v.x]; }

const AgentState* WorldState::find_agent(std::string_view id) const {
    for (const auto& a : agents)
        if (a.id == id) return &a;
    return nullptr;
}

AgentState* WorldState::find_agent(std::string_view id) {
    for (auto& a : agents)
        if (a.id == id) return &a;
    return nullptr;
}

const AgentState& WorldState::agent(std::string_view id) const {
    if (const auto* a = find_agent(id)) return *a;
    throw Error(Errc::unknown_agent, std::string(id));
}

AgentState& WorldState::agent(std::string_view id) {
    if (auto* a = find_agent(id)) return *a;
    throw Error(Errc::unknown_agent, std::string(id));
}

bool WorldState::operator==(const WorldState& o) const {
    const bool same_config = config == o.config || (config && o.config && *config == *o.config);
    return same_config && tick == o.tick && clock == o.clock && grid == o.grid && agents == o.agents &&
           chest == o.chest && placed_by == o.placed_by && started == o.started && outcome == o.outcome;
}

WorldState init_world(const MissionConfig& config) {
    validate(config);
    WorldState w;
    w.config = std::make_shared<const MissionConfig>(config);
    w.grid.assign(static_cast<size_t>(config.width) * config.height, Block{});
    for (const auto& layer : config.plan.layers)
        for (const auto& cell : layer.cells) w.at(cell) = {BlockKind::marker, layer.material, 0};
    for (const auto& t : config.towers) {
        w.at(t.at) = t.count > 0 ? Block{BlockKind::tower_block, t.material, t.count} : Block{BlockKind::air, {}, 0};
    }
    w.at(config.crafting_table) = {BlockKind::crafting_table, {}, 0};
    w.at(config.chest) = {BlockKind::chest, {}, 0};
    return w;
}

Position spawn_position(const MissionConfig& config, AgentKind kind, int index, std::uint64_t seed) {
    const SpawnArea& area = kind == AgentKind::human ? config.human_spawn : config.ai_spawn;
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + (kind == AgentKind::human ? 1 : 2) +
                        static_cast<std::uint64_t>(index) * 7919u);
    const auto cells = static_cast<std::uint64_t>(area.width) * static_cast<std::uint64_t>(area.height);
    const auto pick = static_cast<int>(rng() % cells);
    return center_of({area.origin.x + pick % area.width, area.origin.y + pick / area.width});
}

AgentState& join_agent(WorldState& world, const std::string& id, AgentKind kind, bool can_place, Position spawn) {
    if (world.find_agent(id)) throw Error(Errc::join_rejected, "agent id '" + id + "' already joined");
    if (id.empty()) throw Error(Errc::join_rejected, "empty agent id");
    AgentState a;
    a.id = id;
    a.kind = kind;
    a.can_place = can_place;
    a.position = spawn;
    a.behavior_state = classify_activity(a, landmarks_of(*world.config), world.config->plan, world.config->activity_radius);
    world.agents.push_back(std::move(a));
    return world.agents.back();
}

nav::NavGrid make_nav_grid(const WorldState& world) {
    nav::NavGrid grid(world.width(), world.height());
    for (int y = 0; y < world.height(); ++y)
        for (int x = 0; x < world.width(); ++x)
            if (is_solid(world.at({x, y}))) grid.set_blocked({x, y});
    return grid;
}

namespace {

bool within_reach(const WorldState& w, const AgentState& a, Voxel target) {
    return distance(a.position, center_of(target)) <= w.config->reach + 1e-9;
}

void clear_task(AgentState& a) { a.task = AgentTask{}; }

void drop_held_if_empty(AgentState& a) {
    if (!a.held_item.empty() && a.held_item != kPickaxe && a.inventory.count(a.held_item) == 0) a.held_item.clear();
}

}  // namespace

void begin_move(WorldState& world, const std::string& agent_id, Voxel target) {
    AgentState& a = world.agent(agent_id);
    if (!world.in_bounds(target) || is_solid(world.at(target)))
        throw Error(Errc::not_walkable, "move target " + to_string(target));
    if (a.task.kind == AgentTask::Kind::move && a.task.goal == target) return;
    const auto grid = make_nav_grid(world);
    auto path = nav::plan_path(grid, a.position.cell(), target);
    if (!path) throw Error(Errc::unreachable, "no path to " + to_string(target));
    a.task = AgentTask{};
    a.task.kind = AgentTask::Kind::move;
    a.task.goal = target;
    a.task.path = std::move(*path);
    a.looking_at.reset();
}

void begin_mining(WorldState& world, const std::string& agent_id, Voxel target) {
    AgentState& a = world.agent(agent_id);
    if (!world.in_bounds(target)) throw Error(Errc::not_mineable, "target out of bounds");
    const Block& b = world.at(target);
    if (b.kind != BlockKind::tower_block || b.count <= 0) throw Error(Errc::not_mineable, to_string(target));
    if (!within_reach(world, a, target)) throw Error(Errc::out_of_reach, to_string(target));
    if (a.inventory.total() >= world.config->inventory_capacity) throw Error(Errc::inventory_full, "");
    const bool pick = a.inventory.has_tool(kPickaxe);
    if (!(a.task.kind == AgentTask::Kind::mine && a.task.goal == target)) {
        a.task = AgentTask{};
        a.task.kind = AgentTask::Kind::mine;
        a.task.goal = target;
        a.task.required_ticks = world.config->mining_ticks(b.material, pick);
    }
    a.looking_at = target;
    a.held_item = pick ? std::string(kPickaxe) : std::string();
}

void craft_pickaxe(WorldState& world, const std::string& agent_id) {
    AgentState& a = world.agent(agent_id);
    const auto& cfg = *world.config;
    if (!within_reach(world, a, cfg.crafting_table)) throw Error(Errc::not_at_table, "");
    if (a.inventory.has_tool(kPickaxe)) throw Error(Errc::already_has_pickaxe, "");
    if (a.inventory.count(cfg.pickaxe_material) < cfg.pickaxe_cost)
        throw Error(Errc::insufficient_materials, "pickaxe needs " + std::to_string(cfg.pickaxe_cost) + " " +
                                                      cfg.pickaxe_material);
    a.inventory.add(cfg.pickaxe_material, -cfg.pickaxe_cost);
    a.inventory.tools.insert(std::string(kPickaxe));
    a.held_item = std::string(kPickaxe);
    a.looking_at = cfg.crafting_table;
    clear_task(a);
    a.action = ActionKind::crafting;
}

void chest_transfer(WorldState& world, const std::string& agent_id, ChestDirection direction,
                    const Material& material, int n) {
    AgentState& a = world.agent(agent_id);
    const auto& cfg = *world.config;
    if (n == 0) return;
    if (n < 0) throw Error(Errc::insufficient_materials, "negative transfer count");
    if (!within_reach(world, a, cfg.chest)) throw Error(Errc::out_of_reach, "chest");
    auto chest_count = [&] {
        auto it = world.chest.find(material);
        return it == world.chest.end() ? 0 : it->second;
    };
    int chest_total = 0;
    for (const auto& [m, c] : world.chest) chest_total += c;

    if (direction == ChestDirection::deposit) {
        if (a.inventory.count(material) < n) throw Error(Errc::insufficient_materials, material);
        if (chest_total + n > cfg.chest_capacity) throw Error(Errc::chest_full, "");
        a.inventory.add(material, -n);
        world.chest[material] += n;
        drop_held_if_empty(a);
    } else {
        if (chest_count() < n) throw Error(Errc::insufficient_materials, material + " in chest");
        if (a.inventory.total() + n > cfg.inventory_capacity) throw Error(Errc::inventory_full, "");
        world.chest[material] -= n;
        if (world.chest[material] == 0) world.chest.erase(material);
        a.inventory.add(material, n);
        a.held_item = material;
    }
    a.looking_at = cfg.chest;
    clear_task(a);
    a.action = ActionKind::storing;
}

void place_block(WorldState& world, const std::string& agent_id, Voxel target, const Material& material) {
    AgentState& a = world.agent(agent_id);
    if (!a.can_place) throw Error(Errc::capability_denied, agent_id + " cannot place blocks");
    const auto required = world.config->plan.required_material(target);
    if (!required) throw Error(Errc::not_in_plan, to_string(target));
    if (*required != material) throw Error(Errc::wrong_material, "plan requires " + *required);
    if (world.at(target).kind == BlockKind::placed) throw Error(Errc::occupied, to_string(target));
    for (const auto& other : world.agents)
        if (other.position.cell() == target) throw Error(Errc::occupied, "agent " + other.id + " stands there");
    if (!within_reach(world, a, target)) throw Error(Errc::out_of_reach, to_string(target));
    if (a.inventory.count(material) < 1) throw Error(Errc::insufficient_materials, material);

    world.at(target) = {BlockKind::placed, material, 0};
    world.placed_by[target] = agent_id;
    a.inventory.add(material, -1);
    a.held_item = material;
    drop_held_if_empty(a);
    a.looking_at = target;
    clear_task(a);
    a.action = ActionKind::placing;
}

namespace {

void apply_request(WorldState& w, const std::string& id, const ActionRequest& req) {
    struct Visitor {
        WorldState& w;
        const std::string& id;
        void operator()(const MoveTo& a) const { begin_move(w, id, a.target); }
        void operator()(const Mine& a) const { begin_mining(w, id, a.target); }
        void operator()(const Craft& a) const {
            if (a.item != kPickaxe) throw Error(Errc::unknown_item, a.item);
            craft_pickaxe(w, id);
        }
        void operator()(const ChestOp& a) const { chest_transfer(w, id, a.direction, a.material, a.n); }
        void operator()(const Place& a) const { place_block(w, id, a.target, a.material); }
        void operator()(const Idle&) const { clear_task(w.agent(id)); }
    };
    std::visit(Visitor{w, id}, req);
}

void advance_move(WorldState& w, AgentState& a, double dt, std::vector<ActionRejection>& rejections) {
    double remaining = w.config->agent_speed * dt;
    bool moved = false;
    auto& task = a.task;
    while (remaining > 0.0 && task.next < task.path.size()) {
        const Voxel cell = task.path[task.next];
        if (is_solid(w.at(cell))) {
            // A block landed on the route; replan from where we stand.
            const auto grid = make_nav_grid(w);
            auto path = nav::plan_path(grid, a.position.cell(), task.goal);
            if (!path) {
                rejections.push_back({a.id, 0, Errc::unreachable, "route blocked"});
                clear_task(a);
                break;
            }
            task.path = std::move(*path);
            task.next = 0;
            continue;
        }
        const Position wp = center_of(cell);
        const double d = distance(a.position, wp);
        if (d <= remaining + 1e-9) {
            if (d > 0.0) moved = true;
            a.position = wp;
            remaining = std::max(0.0, remaining - d);
            ++task.next;
        } else {
            a.position.x += (wp.x - a.position.x) / d * remaining;
            a.position.y += (wp.y - a.position.y) / d * remaining;
            remaining = 0.0;
            moved = true;
        }
    }
    if (task.kind == AgentTask::Kind::move && task.next >= task.path.size()) clear_task(a);
    if (moved) a.action = ActionKind::moving;
}

void advance_mine(WorldState& w, AgentState& a, std::vector<ActionRejection>& rejections) {
    const Voxel target = a.task.goal;
    Block& b = w.at(target);
    if (b.kind != BlockKind::tower_block || b.count <= 0) {
        rejections.push_back({a.id, 0, Errc::not_mineable, to_string(target)});
        clear_task(a);
        return;
    }
    if (a.inventory.total() >= w.config->inventory_capacity) {
        rejections.push_back({a.id, 0, Errc::inventory_full, ""});
        clear_task(a);
        return;
    }
    a.action = ActionKind::mining;
    if (++a.task.progress_ticks < a.task.required_ticks) return;
    const Material m = b.material;
    if (--b.count == 0) b = Block{BlockKind::air, {}, 0};
    a.inventory.add(m, 1);
    clear_task(a);
}

}  // namespace

StepResult step(const WorldState& world, std::span<const QueuedAction> actions, double dt) {
    StepResult result{world, {}};
    WorldState& w = result.world;
    const double expected_dt = w.config->tick_seconds();
    if (std::abs(dt - expected_dt) > 1e-12)
        throw Error(Errc::invalid_config, "dt must equal 1/tick_rate_hz");

    std::vector<const QueuedAction*> ordered;
    ordered.reserve(actions.size());
    for (const auto& qa : actions) {
        if (!w.find_agent(qa.agent_id)) throw Error(Errc::unknown_agent, qa.agent_id);
        ordered.push_back(&qa);
    }
    std::stable_sort(ordered.begin(), ordered.end(), [](const QueuedAction* a, const QueuedAction* b) {
        return std::tie(a->seq, a->agent_id) < std::tie(b->seq, b->agent_id);
    });

    for (auto& a : w.agents) a.action = ActionKind::idle;

    for (const QueuedAction* qa : ordered) {
        try {
            apply_request(w, qa->agent_id, qa->request);
        } catch (const Error& e) {
            result.rejections.push_back({qa->agent_id, qa->seq, e.code(), e.detail()});
        }
    }

    for (auto& a : w.agents) {
        switch (a.task.kind) {
            case AgentTask::Kind::move: advance_move(w, a, dt, result.rejections); break;
            case AgentTask::Kind::mine: advance_mine(w, a, result.rejections); break;
            case AgentTask::Kind::none: break;
        }
    }

    ++w.tick;
    w.clock = static_cast<double>(w.tick) / w.config->tick_rate_hz;

    const auto marks = landmarks_of(*w.config);
    for (auto& a : w.agents) a.behavior_state = classify_activity(a, marks, w.config->plan, w.config->activity_radius);

    if (w.started) w.outcome = check_termination(w);
    return result;
}

int filled_cells(const WorldState& world) {
    int filled = 0;
    for (const auto& layer : world.config->plan.layers)
        for (const auto& cell : layer.cells) {
            const Block& b = world.at(cell);
            if (b.kind == BlockKind::placed && b.material == layer.material) ++filled;
        }
    return filled;
}

double completion_score(const WorldState& world) {
    const auto total = world.config->plan.cell_count();
    if (total == 0) return 0.0;
    return static_cast<double>(filled_cells(world)) / static_cast<double>(total);
}

MissionOutcome check_termination(const WorldState& world) {
    MissionOutcome o;
    if (!world.started) return o;
    const auto& cfg = *world.config;
    o.final_completion = completion_score(world);
    const auto limit = cfg.time_limit_ticks();
    if (o.final_completion >= 1.0 && world.tick <= limit) {
        o.status = MissionOutcome::Status::success;
        o.ended_at = world.clock;
    } else if (world.tick >= limit && o.final_completion < 1.0) {
        o.status = MissionOutcome::Status::failure;
        o.ended_at = cfg.time_limit_s;
    }
    return o;
}

std::map<Material, int> tower_remaining(const WorldState& world) {
    std::map<Material, int> out;
    for (const auto& t : world.config->towers) {
        const Block& b = world.at(t.at);
        out[t.material] += b.kind == BlockKind::tower_block ? b.count : 0;
    }
    return out;
}

}  // namespace hmt::world

#include "oracles.hpp"

#include <deque>

namespace hmt::oracle {

std::optional<int> bfs_distance(const nav::NavGrid& grid, Voxel start, Voxel goal) {
    if (!grid.walkable(start) || !grid.walkable(goal)) return std::nullopt;
    std::vector<int> dist(static_cast<size_t>(grid.width()) * grid.height(), -1);
    auto idx = [&](Voxel v) { return static_cast<size_t>(v.y) * grid.width() + v.x; };
    std::deque<Voxel> queue{start};
    dist[idx(start)] = 0;
    while (!queue.empty()) {
        Voxel v = queue.front();
        queue.pop_front();
        if (v == goal) return dist[idx(v)];
        const Voxel next[4] = {{v.x + 1, v.y}, {v.x - 1, v.y}, {v.x, v.y + 1}, {v.x, v.y - 1}};
        for (Voxel n : next) {
            if (!grid.walkable(n) || dist[idx(n)] >= 0) continue;
            dist[idx(n)] = dist[idx(v)] + 1;
            queue.push_back(n);
        }
    }
    return std::nullopt;
}

nav::NavGrid random_grid(std::mt19937_64& rng, int w, int h, double p) {
    nav::NavGrid grid(w, h);
    std::bernoulli_distribution blocked(p);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (blocked(rng)) grid.set_blocked({x, y});
    return grid;
}

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Dyadic fractions survive any decimal round trip, so equality stays exact
// without depending on the printer's shortest-representation algorithm.
double coarse(std::mt19937_64& rng, int lo, int hi) { return uniform(rng, lo * 64, hi * 64) / 64.0; }

double any_double(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(-1e6, 1e6)(rng); }

std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> pieces = {"wood", " ", "stone", "\"q\"", "\\", "\n", "é", "漢", "🙂",
                                                    "brick", "{", "}", "\t", "", "x"};
    std::string s;
    const int n = uniform(rng, 0, 8);
    for (int i = 0; i < n; ++i) s += pieces[uniform(rng, 0, static_cast<int>(pieces.size()) - 1)];
    return s;
}

std::string random_material(std::mt19937_64& rng) {
    static const std::vector<std::string> m = {"wood", "stone", "brick", "glass"};
    return m[uniform(rng, 0, 3)];
}

Voxel random_voxel(std::mt19937_64& rng) { return {uniform(rng, -3, 40), uniform(rng, -3, 40)}; }

world::Inventory random_inventory(std::mt19937_64& rng) {
    world::Inventory inv;
    const int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i) inv.counts[random_material(rng)] = uniform(rng, 1, 64);
    if (uniform(rng, 0, 1)) inv.tools.insert("pickaxe");
    return inv;
}

world::ActivityLabel random_activity(std::mt19937_64& rng) {
    using K = world::ActivityLabel::Kind;
    const auto k = static_cast<K>(uniform(rng, 0, 5));
    return k == K::gathering ? world::ActivityLabel::gathering(random_material(rng)) : world::ActivityLabel::of(k);
}

protocol::AgentView random_view(std::mt19937_64& rng) {
    protocol::AgentView v;
    v.id = random_text(rng) + std::to_string(uniform(rng, 0, 99));
    v.kind = uniform(rng, 0, 1) ? world::AgentKind::human : world::AgentKind::ai;
    v.position = {any_double(rng), any_double(rng)};
    v.inventory = random_inventory(rng);
    if (uniform(rng, 0, 1)) v.held_item = random_material(rng);
    if (uniform(rng, 0, 1)) v.looking_at = random_voxel(rng);
    v.behavior_state = random_activity(rng);
    v.action = static_cast<world::ActionKind>(uniform(rng, 0, 5));
    v.can_place = uniform(rng, 0, 1);
    return v;
}

world::FloorPlan random_plan(std::mt19937_64& rng) {
    world::FloorPlan plan;
    const int layers = uniform(rng, 0, 3);
    for (int i = 0; i < layers; ++i) {
        world::PlanLayer l{random_material(rng), {}};
        const int cells = uniform(rng, 0, 5);
        for (int c = 0; c < cells; ++c) l.cells.push_back(random_voxel(rng));
        plan.layers.push_back(std::move(l));
    }
    return plan;
}

protocol::ServerMessage random_server(std::mt19937_64& rng) {
    switch (uniform(rng, 0, 4)) {
        case 0: {
            protocol::Joined j{random_text(rng), uniform(rng, 0, 1) ? world::AgentKind::human : world::AgentKind::ai,
                               std::nullopt};
            if (uniform(rng, 0, 1)) {
                protocol::WorldInfo w;
                w.width = uniform(rng, 1, 64);
                w.height = uniform(rng, 1, 64);
                for (int i = uniform(rng, 0, 3); i > 0; --i)
                    w.towers.push_back({random_voxel(rng), random_material(rng), uniform(rng, 0, 50)});
                w.crafting_table = random_voxel(rng);
                w.chest = random_voxel(rng);
                w.plan = random_plan(rng);
                w.reach = coarse(rng, 0, 4);
                w.agent_speed = coarse(rng, 0, 10);
                w.activity_radius = any_double(rng);
                w.inventory_capacity = uniform(rng, 1, 100);
                w.pickaxe_cost = uniform(rng, 0, 9);
                w.pickaxe_material = random_material(rng);
                w.time_limit_s = coarse(rng, 0, 1000);
                w.tick_rate_hz = coarse(rng, 1, 60);
                j.world_info = std::move(w);
            }
            return j;
        }
        case 1: {
            protocol::StateUpdate u;
            for (int i = uniform(rng, 0, 3); i > 0; --i) u.agents.push_back(random_view(rng));
            u.world.completion = any_double(rng);
            u.world.clock = any_double(rng);
            u.world.phase = uniform(rng, 1, 5);
            for (int i = uniform(rng, 0, 3); i > 0; --i) u.world.chest[random_material(rng)] = uniform(rng, 0, 500);
            for (int i = uniform(rng, 0, 3); i > 0; --i)
                u.world.towers.push_back({random_voxel(rng), random_material(rng), uniform(rng, 0, 50)});
            for (int i = uniform(rng, 0, 3); i > 0; --i)
                u.world.layers.push_back({random_material(rng), uniform(rng, 0, 30), uniform(rng, 0, 30)});
            for (int i = uniform(rng, 0, 5); i > 0; --i) u.world.placed.push_back(random_voxel(rng));
            return u;
        }
        case 2: return protocol::ChatRelay{random_text(rng), random_text(rng)};
        case 3: {
            world::MissionOutcome o;
            o.status = static_cast<world::MissionOutcome::Status>(uniform(rng, 0, 2));
            o.final_completion = any_double(rng);
            if (uniform(rng, 0, 1)) o.ended_at = any_double(rng);
            return protocol::MissionEnd{o};
        }
        default: return protocol::ErrorNotice{random_text(rng), random_text(rng)};
    }
}

protocol::ClientMessage random_client(std::mt19937_64& rng) {
    switch (uniform(rng, 0, 4)) {
        case 0: {
            protocol::Join j{random_text(rng), uniform(rng, 0, 1) ? world::AgentKind::human : world::AgentKind::ai,
                             std::nullopt};
            if (uniform(rng, 0, 1)) j.can_place = uniform(rng, 0, 1);
            return j;
        }
        case 1: return protocol::ActionMsg{random_action(rng)};
        case 2: return protocol::ChatSend{random_text(rng)};
        case 3: {
            agent::DecisionTrace t;
            t.sim_time = any_double(rng);
            t.phase = uniform(rng, 1, 5);
            for (int i = uniform(rng, 0, 4); i > 0; --i) t.active_branch.push_back({random_text(rng), uniform(rng, 0, 1) == 1});
            t.selected_node = random_text(rng);
            t.emitted_action = random_action(rng);
            return protocol::TraceMsg{t};
        }
        default: return protocol::Disconnect{};
    }
}

}  // namespace

world::ActionRequest random_action(std::mt19937_64& rng) {
    switch (uniform(rng, 0, 5)) {
        case 0: return world::MoveTo{random_voxel(rng)};
        case 1: return world::Mine{random_voxel(rng)};
        case 2: return world::Craft{uniform(rng, 0, 1) ? "pickaxe" : random_text(rng)};
        case 3:
            return world::ChestOp{uniform(rng, 0, 1) ? world::ChestDirection::deposit : world::ChestDirection::withdraw,
                                  random_material(rng), uniform(rng, 0, 64)};
        case 4: return world::Place{random_voxel(rng), random_material(rng)};
        default: return world::Idle{};
    }
}

protocol::Envelope random_envelope(std::mt19937_64& rng) {
    protocol::Envelope e;
    e.seq = std::uniform_int_distribution<std::int64_t>(0, std::int64_t(1) << 53)(rng);
    e.sim_time = any_double(rng);
    if (uniform(rng, 0, 1)) e.payload = random_server(rng);
    else e.payload = random_client(rng);
    return e;
}

}  // namespace hmt::oracle

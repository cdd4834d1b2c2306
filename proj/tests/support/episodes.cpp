#include "episodes.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "hmt/agent/phase.hpp"
#include "hmt/world/world.hpp"

namespace hmt::fixtures {

const orchestrator::EpisodeResult& cached_episode(orchestrator::AiKind ai, std::uint64_t seed) {
    static std::mutex mu;
    static std::map<std::pair<int, std::uint64_t>, orchestrator::EpisodeResult> cache;
    std::lock_guard lock(mu);
    const auto key = std::make_pair(static_cast<int>(ai), seed);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    orchestrator::EpisodeOptions o;
    o.config = world::default_config();
    o.ai = ai;
    o.seed = seed;
    return cache.emplace(key, orchestrator::run_episode(o)).first->second;
}

namespace {

Position random_open_position(std::mt19937_64& rng, const world::WorldState& w) {
    std::uniform_int_distribution<int> xs(0, w.width() - 1), ys(0, w.height() - 1);
    for (;;) {
        const Voxel v{xs(rng), ys(rng)};
        if (!world::is_solid(w.at(v))) return {v.x + 0.5, v.y + 0.5};
    }
}

void randomize_inventory(std::mt19937_64& rng, world::AgentState& a, const std::vector<world::Material>& materials,
                         int capacity) {
    std::uniform_int_distribution<int> mode(0, 3);
    const int m = mode(rng);
    for (const auto& mat : materials) {
        const int hi = m == 0 ? 0 : m == 3 ? capacity : 12;
        a.inventory.add(mat, std::uniform_int_distribution<int>(0, hi)(rng));
    }
    // Trim to capacity.
    while (a.inventory.total() > capacity)
        for (auto& [mat, n] : a.inventory.counts)
            if (n > 0 && a.inventory.total() > capacity) --n;
    if (std::bernoulli_distribution(0.5)(rng)) a.inventory.tools.insert(std::string(world::kPickaxe));
    a.inventory.normalize();
}

}  // namespace

agent::Observation random_observation(std::mt19937_64& rng, const world::MissionConfig& config, int phase) {
    auto w = world::init_world(config);
    const auto materials = config.materials();

    // Completion inside the phase band, filled mostly in layer order.
    const auto& th = config.phase_thresholds;
    const double lo = phase == 1 ? 0.0 : th[phase - 2];
    const double hi = phase == 5 ? 1.0 : th[phase - 1] - 1e-6;
    const double target = std::uniform_real_distribution<double>(lo, hi)(rng);
    std::vector<std::pair<Voxel, world::Material>> cells;
    for (const auto& layer : config.plan.layers)
        for (Voxel v : layer.cells) cells.emplace_back(v, layer.material);
    const auto fill = static_cast<std::size_t>(target * static_cast<double>(cells.size()) + 0.999999);
    std::size_t placed = std::min(fill, cells.size());
    if (placed > 0 && phase > 1 && std::bernoulli_distribution(0.2)(rng)) {
        // Occasionally leave a hole behind the frontier.
        std::shuffle(cells.begin(), cells.begin() + static_cast<long>(placed), rng);
    }
    const std::string placer = "human";
    for (std::size_t i = 0; i < placed; ++i) {
        w.at(cells[i].first) = world::Block{world::BlockKind::placed, cells[i].second, 0};
        w.placed_by[cells[i].first] = placer;
    }
    // Keep the observation inside the requested phase despite rounding.
    while (placed > 0 && agent::current_phase(world::completion_score(w), agent::PhaseThresholds(th)) > phase) {
        --placed;
        w.at(cells[placed].first) = world::Block{world::BlockKind::marker, cells[placed].second, 0};
        w.placed_by.erase(cells[placed].first);
    }

    for (const auto& t : config.towers) {
        const int mode = std::uniform_int_distribution<int>(0, 4)(rng);
        w.at(t.at).count = mode == 0 ? 0 : std::uniform_int_distribution<int>(1, t.count)(rng);
        if (w.at(t.at).count == 0) w.at(t.at) = world::Block{world::BlockKind::air, "", 0};
    }
    for (const auto& m : materials) {
        const int n = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? 0 : std::uniform_int_distribution<int>(0, 30)(rng);
        if (n > 0) w.chest[m] = n;
    }

    w.started = true;
    w.clock = std::uniform_real_distribution<double>(0.0, config.time_limit_s)(rng);
    w.tick = static_cast<std::int64_t>(w.clock * config.tick_rate_hz);
    auto& human = world::join_agent(w, "human", world::AgentKind::human, true, random_open_position(rng, w));
    auto& ai = world::join_agent(w, "ai", world::AgentKind::ai, false, random_open_position(rng, w));
    (void)human;
    (void)ai;
    for (auto& a : w.agents) {
        randomize_inventory(rng, a, materials, config.inventory_capacity);
        a.action = static_cast<world::ActionKind>(std::uniform_int_distribution<int>(0, 5)(rng));
        a.behavior_state.kind = static_cast<world::ActivityLabel::Kind>(std::uniform_int_distribution<int>(0, 5)(rng));
        if (a.behavior_state.kind == world::ActivityLabel::Kind::gathering)
            a.behavior_state.material = materials[std::uniform_int_distribution<std::size_t>(0, materials.size() - 1)(rng)];
    }

    agent::Observation obs;
    obs.self_id = "ai";
    obs.info = protocol::make_world_info(config);
    obs.update = protocol::make_state_update(w);
    return obs;
}

}  // namespace hmt::fixtures

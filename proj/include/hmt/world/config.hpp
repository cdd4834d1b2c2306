#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hmt/world/types.hpp"

namespace hmt::world {

// Everything needed to build a mission world. Defaults describe the desk-scale
// three-layer house; `long_config()` stretches the time limit to 15 minutes.
struct MissionConfig {
    std::string name = "house";
    int width = 28;
    int height = 20;

    FloorPlan plan;
    std::vector<TowerSpec> towers;
    Voxel crafting_table;
    Voxel chest;
    int chest_capacity = 512;

    double time_limit_s = 150.0;
    double tick_rate_hz = 20.0;
    std::uint64_t seed = 7;

    std::map<Material, double> mining_duration_s;
    double pickaxe_speedup = 4.0;
    int pickaxe_cost = 3;
    Material pickaxe_material = "wood";

    double reach = 1.5;
    double agent_speed = 4.0;  // cells per second
    int inventory_capacity = 64;

    // Overhead factor on pure mining time; see check_collaboration().
    double collaboration_multiplier = 2.5;
    bool require_collaboration = true;

    SpawnArea human_spawn;
    SpawnArea ai_spawn;

    std::vector<double> phase_thresholds{0.2, 0.4, 0.6, 0.8};
    double activity_radius = 2.0;
    double position_gate = 0.5;
    int broadcast_every_ticks = 1;
    int view_radius = 7;
    int cell_px = 16;

    bool operator==(const MissionConfig&) const = default;

    std::vector<Material> materials() const;
    double mining_duration(const Material& m, bool has_pickaxe) const;
    // Ticks of sustained mining needed; durations are rounded up to whole ticks.
    int mining_ticks(const Material& m, bool has_pickaxe) const;
    double tick_seconds() const { return 1.0 / tick_rate_hz; }
    std::int64_t time_limit_ticks() const;
};

MissionConfig default_config();
MissionConfig relaxed_config();
MissionConfig long_config();

// Throws Error(invalid_config) describing the first violated rule.
void validate(const MissionConfig& config);

struct CollaborationEstimate {
    double solo_mining_s = 0.0;  // pickaxe wood + every plan cell mined with a pickaxe
    double solo_estimate_s = 0.0;
    double pair_estimate_s = 0.0;
    bool one_agent_fails = false;
    bool two_agents_finish = false;
};

CollaborationEstimate estimate_collaboration(const MissionConfig& config);

MissionConfig parse_config_toml(std::string_view text);
MissionConfig load_config(const std::filesystem::path& path);
std::string to_toml(const MissionConfig& config);

// Hex SHA-256 of the canonical JSON form.
std::string config_digest(const MissionConfig& config);

}  // namespace hmt::world

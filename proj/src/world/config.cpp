#include "hmt/world/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml++/toml.hpp>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/world/serialize.hpp"

namespace hmt::world {

std::vector<Material> MissionConfig::materials() const {
    std::vector<Material> out;
    auto add = [&](const Material& m) {
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    };
    for (const auto& layer : plan.layers) add(layer.material);
    for (const auto& t : towers) add(t.material);
    return out;
}

double MissionConfig::mining_duration(const Material& m, bool has_pickaxe) const {
    auto it = mining_duration_s.find(m);
    if (it == mining_duration_s.end()) throw Error(Errc::not_mineable, "no mining duration for " + m);
    return has_pickaxe ? it->second / pickaxe_speedup : it->second;
}

int MissionConfig::mining_ticks(const Material& m, bool has_pickaxe) const {
    const double ticks = mining_duration(m, has_pickaxe) * tick_rate_hz;
    return std::max(1, static_cast<int>(std::ceil(ticks - 1e-9)));
}

std::int64_t MissionConfig::time_limit_ticks() const {
    return static_cast<std::int64_t>(std::llround(time_limit_s * tick_rate_hz));
}

namespace {

std::vector<Voxel> rect_cells(int x, int y, int w, int h) {
    std::vector<Voxel> cells;
    for (int yy = y; yy < y + h; ++yy)
        for (int xx = x; xx < x + w; ++xx) cells.push_back({xx, yy});
    return cells;
}

bool inside(const SpawnArea& a, Voxel v) {
    return v.x >= a.origin.x && v.y >= a.origin.y && v.x < a.origin.x + a.width && v.y < a.origin.y + a.height;
}

void require(bool cond, const std::string& what) {
    if (!cond) throw Error(Errc::invalid_config, what);
}

}  // namespace

MissionConfig default_config() {
    MissionConfig c;
    c.plan.layers = {
        {"wood", rect_cells(9, 8, 10, 3)},
        {"stone", rect_cells(9, 11, 10, 3)},
        {"brick", rect_cells(9, 14, 10, 3)},
    };
    c.towers = {
        {{4, 3}, "wood", 45},
        {{14, 2}, "stone", 40},
        {{23, 3}, "brick", 40},
    };
    c.crafting_table = {7, 4};
    c.chest = {14, 6};
    c.mining_duration_s = {{"wood", 2.0}, {"stone", 3.0}, {"brick", 3.0}};
    c.human_spawn = {{10, 18}, 5, 2};
    c.ai_spawn = {{15, 18}, 5, 2};
    return c;
}

MissionConfig relaxed_config() {
    MissionConfig c = default_config();
    c.name = "house-relaxed";
    c.time_limit_s = 300.0;
    c.require_collaboration = false;
    return c;
}

MissionConfig long_config() {
    MissionConfig c = default_config();
    c.name = "house-15min";
    c.time_limit_s = 900.0;
    c.require_collaboration = false;
    return c;
}

CollaborationEstimate estimate_collaboration(const MissionConfig& config) {
    CollaborationEstimate e;
    e.solo_mining_s = config.pickaxe_cost * config.mining_duration(config.pickaxe_material, false);
    for (const auto& layer : config.plan.layers)
        e.solo_mining_s += static_cast<double>(layer.cells.size()) * config.mining_duration(layer.material, true);
    e.solo_estimate_s = config.collaboration_multiplier * e.solo_mining_s;
    e.pair_estimate_s = e.solo_estimate_s / 2.0;
    e.one_agent_fails = e.solo_estimate_s > config.time_limit_s;
    e.two_agents_finish = e.pair_estimate_s <= config.time_limit_s;
    return e;
}

void validate(const MissionConfig& c) {
    require(c.width > 0 && c.height > 0, "world dimensions must be positive");
    require(c.time_limit_s > 0, "time_limit_s must be > 0");
    require(c.tick_rate_hz > 0, "tick_rate_hz must be > 0");
    require(c.pickaxe_speedup >= 1.0, "pickaxe_speedup must be >= 1");
    require(c.pickaxe_cost >= 0, "pickaxe_cost must be >= 0");
    require(c.reach > 0, "reach must be > 0");
    require(c.agent_speed > 0, "agent speed must be > 0");
    require(c.inventory_capacity > 0, "inventory_capacity must be > 0");
    require(c.chest_capacity >= 0, "chest capacity must be >= 0");
    require(c.activity_radius >= 0, "activity_radius must be >= 0");
    require(c.position_gate > 0, "position_gate must be > 0");
    require(c.broadcast_every_ticks >= 1, "broadcast_every_ticks must be >= 1");
    require(c.view_radius >= 0 && c.cell_px >= 1, "render settings out of range");
    require(c.collaboration_multiplier > 0, "collaboration_multiplier must be > 0");

    require(c.phase_thresholds.size() == 4, "exactly four phase thresholds are required");
    for (size_t i = 0; i < c.phase_thresholds.size(); ++i) {
        const double t = c.phase_thresholds[i];
        require(t > 0.0 && t < 1.0, "phase thresholds must lie in (0,1)");
        if (i > 0) require(t > c.phase_thresholds[i - 1], "phase thresholds must be strictly ascending");
    }

    auto in_bounds = [&](Voxel v) { return v.x >= 0 && v.y >= 0 && v.x < c.width && v.y < c.height; };

    require(!c.plan.layers.empty() && c.plan.cell_count() > 0, "floor plan is empty");
    std::set<Voxel> plan_cells;
    for (const auto& layer : c.plan.layers) {
        require(!layer.material.empty(), "plan layer without material");
        require(!layer.cells.empty(), "plan layer '" + layer.material + "' has no cells");
        require(c.mining_duration_s.count(layer.material) > 0, "no mining duration for " + layer.material);
        for (const auto& cell : layer.cells) {
            require(in_bounds(cell), "plan cell " + to_string(cell) + " out of bounds");
            require(plan_cells.insert(cell).second, "plan cell " + to_string(cell) + " listed twice");
        }
    }

    std::set<Voxel> fixtures;
    auto add_fixture = [&](Voxel v, const std::string& what) {
        require(in_bounds(v), what + " out of bounds");
        require(!plan_cells.count(v), what + " overlaps the floor plan");
        require(fixtures.insert(v).second, what + " overlaps another fixture");
    };
    for (const auto& t : c.towers) {
        require(t.count >= 0, "tower count must be >= 0");
        require(c.mining_duration_s.count(t.material) > 0, "no mining duration for " + t.material);
        add_fixture(t.at, t.material + " tower");
    }
    add_fixture(c.crafting_table, "crafting table");
    add_fixture(c.chest, "chest");
    for (const auto& [m, d] : c.mining_duration_s) require(d > 0, "mining duration for " + m + " must be > 0");
    require(c.mining_duration_s.count(c.pickaxe_material) > 0, "pickaxe material has no mining duration");

    for (const SpawnArea* area : {&c.human_spawn, &c.ai_spawn}) {
        require(area->width > 0 && area->height > 0, "spawn area must be non-empty");
        require(in_bounds(area->origin) &&
                    in_bounds({area->origin.x + area->width - 1, area->origin.y + area->height - 1}),
                "spawn area out of bounds");
        for (const auto& f : fixtures) require(!inside(*area, f), "spawn area overlaps a fixture");
    }

    if (c.require_collaboration) {
        const auto e = estimate_collaboration(c);
        std::ostringstream msg;
        msg << "collaboration check failed: solo estimate " << e.solo_estimate_s << " s, pair estimate "
            << e.pair_estimate_s << " s, time limit " << c.time_limit_s << " s";
        require(e.one_agent_fails && e.two_agents_finish, msg.str());
    }
}

// ---------------------------------------------------------------------------
// TOML

namespace {

Voxel voxel_from_array(const toml::node& node, const std::string& key) {
    const auto* arr = node.as_array();
    if (!arr || arr->size() != 2) throw Error(Errc::invalid_config, key + " must be [x, y]");
    auto x = (*arr)[0].value<int64_t>();
    auto y = (*arr)[1].value<int64_t>();
    if (!x || !y) throw Error(Errc::invalid_config, key + " must contain integers");
    return {static_cast<int>(*x), static_cast<int>(*y)};
}

std::vector<int> ints(const toml::node& node, const std::string& key, size_t n) {
    const auto* arr = node.as_array();
    if (!arr || arr->size() != n) throw Error(Errc::invalid_config, key + " must have " + std::to_string(n) + " entries");
    std::vector<int> out;
    for (const auto& e : *arr) {
        auto v = e.value<int64_t>();
        if (!v) throw Error(Errc::invalid_config, key + " must contain integers");
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

class TableReader {
public:
    TableReader(const toml::table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

    ~TableReader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, node] : table_) {
            if (!seen_.count(std::string(key.str())))
                throw Error(Errc::invalid_config, "unknown key '" + prefix_ + std::string(key.str()) + "'");
        }
    }

    const toml::node* get(const std::string& key) {
        seen_.insert(key);
        return table_.get(key);
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        const toml::node* node = get(key);
        if (!node) return;
        if constexpr (std::is_same_v<T, std::string>) {
            auto v = node->value<std::string>();
            if (!v) throw Error(Errc::invalid_config, prefix_ + key + " must be a string");
            out = *v;
        } else if constexpr (std::is_same_v<T, bool>) {
            auto v = node->value<bool>();
            if (!v) throw Error(Errc::invalid_config, prefix_ + key + " must be a boolean");
            out = *v;
        } else if constexpr (std::is_floating_point_v<T>) {
            auto v = node->value<double>();
            if (!v) throw Error(Errc::invalid_config, prefix_ + key + " must be a number");
            out = *v;
        } else {
            auto v = node->value<int64_t>();
            if (!v) throw Error(Errc::invalid_config, prefix_ + key + " must be an integer");
            out = static_cast<T>(*v);
        }
    }

    const toml::table* table(const std::string& key) {
        const toml::node* node = get(key);
        if (!node) return nullptr;
        const auto* t = node->as_table();
        if (!t) throw Error(Errc::invalid_config, prefix_ + key + " must be a table");
        return t;
    }

private:
    const toml::table& table_;
    std::string prefix_;
    std::set<std::string> seen_;
};

SpawnArea spawn_from(const toml::node& node, const std::string& key) {
    auto v = ints(node, key, 4);
    return {{v[0], v[1]}, v[2], v[3]};
}

}  // namespace

MissionConfig parse_config_toml(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << e.source().begin.line << ": " << e.description();
        throw Error(Errc::invalid_config, msg.str());
    }

    MissionConfig c = default_config();
    {
        TableReader r(root, "");
        r.read("name", c.name);
        if (const auto* t = r.table("world")) {
            TableReader w(*t, "world.");
            w.read("width", c.width);
            w.read("height", c.height);
        }
        if (const auto* t = r.table("mission")) {
            TableReader m(*t, "mission.");
            m.read("time_limit_s", c.time_limit_s);
            m.read("tick_rate_hz", c.tick_rate_hz);
            int64_t seed = static_cast<int64_t>(c.seed);
            m.read("seed", seed);
            c.seed = static_cast<std::uint64_t>(seed);
            m.read("require_collaboration", c.require_collaboration);
            m.read("collaboration_multiplier", c.collaboration_multiplier);
        }
        if (const auto* t = r.table("agents")) {
            TableReader a(*t, "agents.");
            a.read("speed", c.agent_speed);
            a.read("reach", c.reach);
            a.read("inventory_capacity", c.inventory_capacity);
            a.read("activity_radius", c.activity_radius);
        }
        if (const auto* t = r.table("mining")) {
            TableReader m(*t, "mining.");
            m.read("pickaxe_speedup", c.pickaxe_speedup);
            if (const auto* d = m.table("duration_s")) {
                c.mining_duration_s.clear();
                for (const auto& [key, node] : *d) {
                    auto v = node.value<double>();
                    if (!v) throw Error(Errc::invalid_config, "mining.duration_s values must be numbers");
                    c.mining_duration_s[std::string(key.str())] = *v;
                }
            }
        }
        if (const auto* t = r.table("crafting")) {
            TableReader cr(*t, "crafting.");
            cr.read("pickaxe_cost", c.pickaxe_cost);
            cr.read("pickaxe_material", c.pickaxe_material);
            if (const auto* n = cr.get("table")) c.crafting_table = voxel_from_array(*n, "crafting.table");
        }
        if (const auto* t = r.table("chest")) {
            TableReader ch(*t, "chest.");
            if (const auto* n = ch.get("at")) c.chest = voxel_from_array(*n, "chest.at");
            ch.read("capacity", c.chest_capacity);
        }
        if (const auto* n = r.get("towers")) {
            const auto* arr = n->as_array();
            if (!arr) throw Error(Errc::invalid_config, "towers must be an array of tables");
            c.towers.clear();
            for (const auto& e : *arr) {
                const auto* t = e.as_table();
                if (!t) throw Error(Errc::invalid_config, "towers must be an array of tables");
                TableReader tr(*t, "towers.");
                TowerSpec spec;
                const auto* at = tr.get("at");
                if (!at) throw Error(Errc::invalid_config, "tower needs 'at'");
                spec.at = voxel_from_array(*at, "towers.at");
                tr.read("material", spec.material);
                tr.read("count", spec.count);
                c.towers.push_back(spec);
            }
        }
        if (const auto* t = r.table("plan")) {
            TableReader p(*t, "plan.");
            if (const auto* n = p.get("layers")) {
                const auto* arr = n->as_array();
                if (!arr) throw Error(Errc::invalid_config, "plan.layers must be an array of tables");
                c.plan.layers.clear();
                for (const auto& e : *arr) {
                    const auto* lt = e.as_table();
                    if (!lt) throw Error(Errc::invalid_config, "plan.layers must be an array of tables");
                    TableReader lr(*lt, "plan.layers.");
                    PlanLayer layer;
                    lr.read("material", layer.material);
                    if (const auto* rect = lr.get("rect")) {
                        auto v = ints(*rect, "plan.layers.rect", 4);
                        auto cells = rect_cells(v[0], v[1], v[2], v[3]);
                        layer.cells.insert(layer.cells.end(), cells.begin(), cells.end());
                    }
                    if (const auto* cells = lr.get("cells")) {
                        const auto* ca = cells->as_array();
                        if (!ca) throw Error(Errc::invalid_config, "plan.layers.cells must be an array");
                        for (const auto& cell : *ca) layer.cells.push_back(voxel_from_array(cell, "plan.layers.cells"));
                    }
                    c.plan.layers.push_back(std::move(layer));
                }
            }
        }
        if (const auto* t = r.table("spawn")) {
            TableReader s(*t, "spawn.");
            if (const auto* n = s.get("human")) c.human_spawn = spawn_from(*n, "spawn.human");
            if (const auto* n = s.get("ai")) c.ai_spawn = spawn_from(*n, "spawn.ai");
        }
        if (const auto* t = r.table("phases")) {
            TableReader ph(*t, "phases.");
            if (const auto* n = ph.get("thresholds")) {
                const auto* arr = n->as_array();
                if (!arr) throw Error(Errc::invalid_config, "phases.thresholds must be an array");
                c.phase_thresholds.clear();
                for (const auto& e : *arr) {
                    auto v = e.value<double>();
                    if (!v) throw Error(Errc::invalid_config, "phases.thresholds must contain numbers");
                    c.phase_thresholds.push_back(*v);
                }
            }
        }
        if (const auto* t = r.table("logging")) {
            TableReader l(*t, "logging.");
            l.read("position_gate", c.position_gate);
            l.read("broadcast_every_ticks", c.broadcast_every_ticks);
        }
        if (const auto* t = r.table("replay")) {
            TableReader rp(*t, "replay.");
            rp.read("view_radius", c.view_radius);
            rp.read("cell_px", c.cell_px);
        }
    }
    validate(c);
    return c;
}

MissionConfig load_config(const std::filesystem::path& path) { return parse_config_toml(read_file(path)); }

namespace {

std::string toml_number(double v) {
    std::string s = format_seconds(v);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string toml_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    return out + "\"";
}

std::string toml_voxel(Voxel v) { return "[" + std::to_string(v.x) + ", " + std::to_string(v.y) + "]"; }

std::string toml_spawn(const SpawnArea& a) {
    return "[" + std::to_string(a.origin.x) + ", " + std::to_string(a.origin.y) + ", " + std::to_string(a.width) +
           ", " + std::to_string(a.height) + "]";
}

}  // namespace

std::string to_toml(const MissionConfig& c) {
    std::ostringstream o;
    o << "name = " << toml_string(c.name) << "\n\n";
    o << "[world]\nwidth = " << c.width << "\nheight = " << c.height << "\n\n";
    o << "[mission]\ntime_limit_s = " << toml_number(c.time_limit_s) << "\ntick_rate_hz = " << toml_number(c.tick_rate_hz)
      << "\nseed = " << static_cast<int64_t>(c.seed) << "\nrequire_collaboration = "
      << (c.require_collaboration ? "true" : "false")
      << "\ncollaboration_multiplier = " << toml_number(c.collaboration_multiplier) << "\n\n";
    o << "[agents]\nspeed = " << toml_number(c.agent_speed) << "\nreach = " << toml_number(c.reach)
      << "\ninventory_capacity = " << c.inventory_capacity << "\nactivity_radius = " << toml_number(c.activity_radius)
      << "\n\n";
    o << "[mining]\npickaxe_speedup = " << toml_number(c.pickaxe_speedup) << "\n\n[mining.duration_s]\n";
    for (const auto& [m, d] : c.mining_duration_s) o << m << " = " << toml_number(d) << "\n";
    o << "\n[crafting]\npickaxe_cost = " << c.pickaxe_cost << "\npickaxe_material = " << toml_string(c.pickaxe_material)
      << "\ntable = " << toml_voxel(c.crafting_table) << "\n\n";
    o << "[chest]\nat = " << toml_voxel(c.chest) << "\ncapacity = " << c.chest_capacity << "\n\n";
    for (const auto& t : c.towers) {
        o << "[[towers]]\nat = " << toml_voxel(t.at) << "\nmaterial = " << toml_string(t.material)
          << "\ncount = " << t.count << "\n\n";
    }
    for (const auto& layer : c.plan.layers) {
        o << "[[plan.layers]]\nmaterial = " << toml_string(layer.material) << "\ncells = [";
        for (size_t i = 0; i < layer.cells.size(); ++i) o << (i ? ", " : "") << toml_voxel(layer.cells[i]);
        o << "]\n\n";
    }
    o << "[spawn]\nhuman = " << toml_spawn(c.human_spawn) << "\nai = " << toml_spawn(c.ai_spawn) << "\n\n";
    o << "[phases]\nthresholds = [";
    for (size_t i = 0; i < c.phase_thresholds.size(); ++i) o << (i ? ", " : "") << toml_number(c.phase_thresholds[i]);
    o << "]\n\n";
    o << "[logging]\nposition_gate = " << toml_number(c.position_gate)
      << "\nbroadcast_every_ticks = " << c.broadcast_every_ticks << "\n\n";
    o << "[replay]\nview_radius = " << c.view_radius << "\ncell_px = " << c.cell_px << "\n";
    return o.str();
}

std::string config_digest(const MissionConfig& config) { return sha256_hex(to_json(config).dump()); }

}  // namespace hmt::world

#include "hmt/world/types.hpp"

#include "hmt/common/error.hpp"

namespace hmt::world {

bool is_solid(const Block& block) {
    switch (block.kind) {
        case BlockKind::tower_block:
        case BlockKind::crafting_table:
        case BlockKind::chest:
        case BlockKind::placed: return true;
        default: return false;
    }
}

std::string_view to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::air: return "air";
        case BlockKind::ground: return "ground";
        case BlockKind::marker: return "marker";
        case BlockKind::tower_block: return "tower_block";
        case BlockKind::crafting_table: return "crafting_table";
        case BlockKind::chest: return "chest";
        case BlockKind::placed: return "placed";
    }
    return "ground";
}

BlockKind block_kind_from_string(std::string_view s) {
    for (auto k : {BlockKind::air, BlockKind::ground, BlockKind::marker, BlockKind::tower_block,
                   BlockKind::crafting_table, BlockKind::chest, BlockKind::placed}) {
        if (to_string(k) == s) return k;
    }
    throw Error(Errc::unknown_variant, "block kind '" + std::string(s) + "'");
}

int Inventory::count(const Material& m) const {
    auto it = counts.find(m);
    return it == counts.end() ? 0 : it->second;
}

int Inventory::total() const {
    int sum = 0;
    for (const auto& [m, n] : counts) sum += n;
    return sum;
}

void Inventory::add(const Material& m, int n) {
    counts[m] += n;
    normalize();
}

void Inventory::normalize() {
    std::erase_if(counts, [](const auto& kv) { return kv.second == 0; });
}

std::string_view to_string(AgentKind kind) { return kind == AgentKind::human ? "human" : "ai"; }

AgentKind agent_kind_from_string(std::string_view s) {
    if (s == "human") return AgentKind::human;
    if (s == "ai") return AgentKind::ai;
    throw Error(Errc::unknown_variant, "agent kind '" + std::string(s) + "'");
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::idle: return "idle";
        case ActionKind::moving: return "moving";
        case ActionKind::mining: return "mining";
        case ActionKind::crafting: return "crafting";
        case ActionKind::placing: return "placing";
        case ActionKind::storing: return "storing";
    }
    return "idle";
}

ActionKind action_kind_from_string(std::string_view s) {
    for (auto k : {ActionKind::idle, ActionKind::moving, ActionKind::mining, ActionKind::crafting,
                   ActionKind::placing, ActionKind::storing}) {
        if (to_string(k) == s) return k;
    }
    throw Error(Errc::unknown_variant, "action kind '" + std::string(s) + "'");
}

std::string to_string(const ActivityLabel& label) {
    using K = ActivityLabel::Kind;
    switch (label.kind) {
        case K::gathering: return "gathering(" + label.material + ")";
        case K::crafting: return "crafting";
        case K::building: return "building";
        case K::at_chest: return "at_chest";
        case K::traveling: return "traveling";
        case K::idle: return "idle";
    }
    return "idle";
}

ActivityLabel activity_from_string(std::string_view s) {
    using K = ActivityLabel::Kind;
    constexpr std::string_view prefix = "gathering(";
    if (s.starts_with(prefix) && s.ends_with(")") && s.size() > prefix.size() + 1)
        return ActivityLabel::gathering(std::string(s.substr(prefix.size(), s.size() - prefix.size() - 1)));
    if (s == "crafting") return ActivityLabel::of(K::crafting);
    if (s == "building") return ActivityLabel::of(K::building);
    if (s == "at_chest") return ActivityLabel::of(K::at_chest);
    if (s == "traveling") return ActivityLabel::of(K::traveling);
    if (s == "idle") return ActivityLabel::of(K::idle);
    throw Error(Errc::unknown_variant, "activity '" + std::string(s) + "'");
}

size_t FloorPlan::cell_count() const {
    size_t n = 0;
    for (const auto& layer : layers) n += layer.cells.size();
    return n;
}

std::optional<Material> FloorPlan::required_material(Voxel v) const {
    for (const auto& layer : layers) {
        for (const auto& c : layer.cells) {
            if (c == v) return layer.material;
        }
    }
    return std::nullopt;
}

std::string_view to_string(MissionOutcome::Status status) {
    switch (status) {
        case MissionOutcome::Status::ongoing: return "ongoing";
        case MissionOutcome::Status::success: return "success";
        case MissionOutcome::Status::failure: return "failure";
    }
    return "ongoing";
}

MissionOutcome::Status outcome_status_from_string(std::string_view s) {
    if (s == "ongoing") return MissionOutcome::Status::ongoing;
    if (s == "success") return MissionOutcome::Status::success;
    if (s == "failure") return MissionOutcome::Status::failure;
    throw Error(Errc::unknown_variant, "outcome status '" + std::string(s) + "'");
}

std::string_view action_name(const ActionRequest& request) {
    struct Visitor {
        std::string_view operator()(const MoveTo&) const { return "move_to"; }
        std::string_view operator()(const Mine&) const { return "mine"; }
        std::string_view operator()(const Craft&) const { return "craft"; }
        std::string_view operator()(const ChestOp&) const { return "chest"; }
        std::string_view operator()(const Place&) const { return "place"; }
        std::string_view operator()(const Idle&) const { return "idle"; }
    };
    return std::visit(Visitor{}, request);
}

std::string describe(const ActionRequest& request) {
    struct Visitor {
        std::string operator()(const MoveTo& a) const { return "move_to" + hmt::to_string(a.target); }
        std::string operator()(const Mine& a) const { return "mine" + hmt::to_string(a.target); }
        std::string operator()(const Craft& a) const { return "craft(" + a.item + ")"; }
        std::string operator()(const ChestOp& a) const {
            return std::string(a.direction == ChestDirection::deposit ? "deposit(" : "withdraw(") + a.material +
                   "," + std::to_string(a.n) + ")";
        }
        std::string operator()(const Place& a) const {
            return "place" + hmt::to_string(a.target) + "[" + a.material + "]";
        }
        std::string operator()(const Idle&) const { return "idle"; }
    };
    return std::visit(Visitor{}, request);
}

}  // namespace hmt::world

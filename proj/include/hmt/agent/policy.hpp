#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmt/agent/phase.hpp"

namespace hmt::agent {

// Material argument of a predicate or skill.
struct MaterialSelector {
    enum class Kind { literal, current_layer, next_layer, complement, any };

    Kind kind = Kind::literal;
    std::string material;  // literal only

    bool operator==(const MaterialSelector&) const = default;
};

enum class PredicateKind {
    mission_complete,
    has_pickaxe,
    can_craft_pickaxe,
    inventory_full,
    human_gathering,
    carrying_at_least,
    chest_below,
    material_needed,
    near,
};

enum class SkillKind { gather, craft_pickaxe, deposit, go_to, idle };

struct PolicyNode {
    std::string name;
    bool leaf = false;

    // Branch nodes.
    PredicateKind predicate = PredicateKind::mission_complete;
    int on_true = -1;
    int on_false = -1;

    // Leaves.
    SkillKind skill = SkillKind::idle;

    // Arguments shared by predicates and skills.
    MaterialSelector material;
    int n = 0;
    std::string landmark;
};

// Nodes of one phase tree; index 0 is the root.
struct PolicyTree {
    std::vector<PolicyNode> nodes;
};

struct DecisionTreePolicy {
    std::string name;
    std::string description;
    PhaseThresholds thresholds;
    std::array<PolicyTree, 5> phases;
};

std::string_view to_string(PredicateKind p);
std::string_view to_string(SkillKind s);

// Throws Error(invalid_policy). Rejects unknown predicates and skills,
// duplicate node names within a phase, and any attempt to use `place`.
DecisionTreePolicy parse_policy(const nlohmann::json& j);
DecisionTreePolicy parse_policy_text(std::string_view text);
DecisionTreePolicy load_policy(const std::filesystem::path& path);
nlohmann::json policy_to_json(const DecisionTreePolicy& policy);

// The five-phase reference policy bundled with the build.
DecisionTreePolicy reference_policy();
std::string_view reference_policy_text();

}  // namespace hmt::agent

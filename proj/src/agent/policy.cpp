#include "hmt/agent/policy.hpp"

#include <set>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "reference_policy.inc"

namespace hmt::agent {

using nlohmann::json;

namespace {

struct PredicateSpec {
    PredicateKind kind;
    std::string_view name;
    bool takes_material;
    bool takes_n;
    bool takes_landmark;
};

constexpr PredicateSpec kPredicates[] = {
    {PredicateKind::mission_complete, "mission_complete", false, false, false},
    {PredicateKind::has_pickaxe, "has_pickaxe", false, false, false},
    {PredicateKind::can_craft_pickaxe, "can_craft_pickaxe", false, false, false},
    {PredicateKind::inventory_full, "inventory_full", false, false, false},
    {PredicateKind::human_gathering, "human_gathering", true, false, false},
    {PredicateKind::carrying_at_least, "carrying_at_least", true, true, false},
    {PredicateKind::chest_below, "chest_below", true, true, false},
    {PredicateKind::material_needed, "material_needed", true, false, false},
    {PredicateKind::near, "near", false, false, true},
};

struct SkillSpec {
    SkillKind kind;
    std::string_view name;
    bool takes_material;
    bool takes_landmark;
};

constexpr SkillSpec kSkills[] = {
    {SkillKind::gather, "gather", true, false},
    {SkillKind::craft_pickaxe, "craft_pickaxe", false, false},
    {SkillKind::deposit, "deposit", true, false},
    {SkillKind::go_to, "go_to", false, true},
    {SkillKind::idle, "idle", false, false},
};

const std::set<std::string_view> kLandmarkWords = {"crafting_table", "chest", "plan_centroid"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(Errc::invalid_policy, where + ": " + what);
}

MaterialSelector parse_selector(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "'material' must be a string");
    const auto s = j.get<std::string>();
    if (s.empty()) fail(where, "'material' must not be empty");
    if (s == "current_layer") return {MaterialSelector::Kind::current_layer, {}};
    if (s == "next_layer") return {MaterialSelector::Kind::next_layer, {}};
    if (s == "complement") return {MaterialSelector::Kind::complement, {}};
    if (s == "any") return {MaterialSelector::Kind::any, {}};
    return {MaterialSelector::Kind::literal, s};
}

std::string selector_text(const MaterialSelector& s) {
    switch (s.kind) {
        case MaterialSelector::Kind::current_layer: return "current_layer";
        case MaterialSelector::Kind::next_layer: return "next_layer";
        case MaterialSelector::Kind::complement: return "complement";
        case MaterialSelector::Kind::any: return "any";
        case MaterialSelector::Kind::literal: break;
    }
    return s.material;
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok |= k == a;
        if (!ok) fail(where, "unexpected key '" + k + "'");
    }
}

class TreeBuilder {
public:
    explicit TreeBuilder(int phase) : phase_(phase) {}

    int build(const json& j, int depth) {
        const std::string where = "phase " + std::to_string(phase_);
        if (depth > 64) fail(where, "tree deeper than 64 levels");
        if (!j.is_object()) fail(where, "every node must be an object");
        if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty())
            fail(where, "every node needs a non-empty 'name'");
        PolicyNode node;
        node.name = j["name"].get<std::string>();
        const std::string at = where + " node '" + node.name + "'";
        if (!names_.insert(node.name).second) fail(at, "duplicate node name");

        const bool has_skill = j.contains("skill");
        const bool has_if = j.contains("if");
        if (has_skill == has_if) fail(at, "a node has either 'skill' (leaf) or 'if'/'then'/'else' (branch)");

        if (has_skill) {
            check_keys(j, {"name", "skill", "material", "landmark"}, at);
            node.leaf = true;
            if (!j["skill"].is_string()) fail(at, "'skill' must be a string");
            const auto skill = j["skill"].get<std::string>();
            if (skill == "place") fail(at, "'place' is not available to AI agents");
            const SkillSpec* spec = nullptr;
            for (const auto& s : kSkills)
                if (s.name == skill) spec = &s;
            if (!spec) fail(at, "unknown skill '" + skill + "'");
            node.skill = spec->kind;
            if (spec->takes_material) {
                if (!j.contains("material")) fail(at, "skill '" + skill + "' needs 'material'");
                node.material = parse_selector(j["material"], at);
                if (node.skill == SkillKind::gather && node.material.kind == MaterialSelector::Kind::any)
                    fail(at, "gather needs a concrete material selector");
            } else if (j.contains("material")) {
                fail(at, "skill '" + skill + "' takes no 'material'");
            }
            if (spec->takes_landmark) node.landmark = landmark_arg(j, at);
            else if (j.contains("landmark")) fail(at, "skill '" + skill + "' takes no 'landmark'");
            return push(std::move(node));
        }

        check_keys(j, {"name", "if", "then", "else"}, at);
        if (!j.contains("then") || !j.contains("else")) fail(at, "branch needs both 'then' and 'else'");
        const json& cond = j["if"];
        if (!cond.is_object() || !cond.contains("predicate") || !cond["predicate"].is_string())
            fail(at, "'if' must be an object with a 'predicate' name");
        check_keys(cond, {"predicate", "material", "n", "landmark"}, at);
        const auto pname = cond["predicate"].get<std::string>();
        const PredicateSpec* spec = nullptr;
        for (const auto& p : kPredicates)
            if (p.name == pname) spec = &p;
        if (!spec) fail(at, "unknown predicate '" + pname + "'");
        node.predicate = spec->kind;
        if (spec->takes_material) {
            if (!cond.contains("material")) fail(at, "predicate '" + pname + "' needs 'material'");
            node.material = parse_selector(cond["material"], at);
        } else if (cond.contains("material")) {
            fail(at, "predicate '" + pname + "' takes no 'material'");
        }
        if (spec->takes_n) {
            if (!cond.contains("n") || !cond["n"].is_number_integer() || cond["n"].get<int>() < 0)
                fail(at, "predicate '" + pname + "' needs a non-negative integer 'n'");
            node.n = cond["n"].get<int>();
        } else if (cond.contains("n")) {
            fail(at, "predicate '" + pname + "' takes no 'n'");
        }
        if (spec->takes_landmark) node.landmark = landmark_arg(cond, at);
        else if (cond.contains("landmark")) fail(at, "predicate '" + pname + "' takes no 'landmark'");

        const int self = push(std::move(node));
        const int t = build(j["then"], depth + 1);
        const int f = build(j["else"], depth + 1);
        tree_.nodes[static_cast<size_t>(self)].on_true = t;
        tree_.nodes[static_cast<size_t>(self)].on_false = f;
        return self;
    }

    PolicyTree take() { return std::move(tree_); }

private:
    int push(PolicyNode node) {
        tree_.nodes.push_back(std::move(node));
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    static std::string landmark_arg(const json& j, const std::string& at) {
        if (!j.contains("landmark") || !j["landmark"].is_string()) fail(at, "'landmark' string required");
        const auto l = j["landmark"].get<std::string>();
        // Tower landmarks are "<material>_tower" with an optional "_<n>" suffix.
        if (!kLandmarkWords.count(l) && l.find("_tower") == std::string::npos)
            fail(at, "unknown landmark '" + l + "'");
        return l;
    }

    int phase_;
    PolicyTree tree_;
    std::set<std::string> names_;
};

json node_json(const PolicyTree& tree, int index) {
    const PolicyNode& n = tree.nodes[static_cast<size_t>(index)];
    json j{{"name", n.name}};
    if (n.leaf) {
        j["skill"] = to_string(n.skill);
        if (n.skill == SkillKind::gather || n.skill == SkillKind::deposit) j["material"] = selector_text(n.material);
        if (n.skill == SkillKind::go_to) j["landmark"] = n.landmark;
        return j;
    }
    json cond{{"predicate", to_string(n.predicate)}};
    for (const auto& p : kPredicates)
        if (p.kind == n.predicate) {
            if (p.takes_material) cond["material"] = selector_text(n.material);
            if (p.takes_n) cond["n"] = n.n;
            if (p.takes_landmark) cond["landmark"] = n.landmark;
        }
    j["if"] = cond;
    j["then"] = node_json(tree, n.on_true);
    j["else"] = node_json(tree, n.on_false);
    return j;
}

}  // namespace

std::string_view to_string(PredicateKind p) {
    for (const auto& s : kPredicates)
        if (s.kind == p) return s.name;
    return "?";
}

std::string_view to_string(SkillKind k) {
    for (const auto& s : kSkills)
        if (s.kind == k) return s.name;
    return "?";
}

DecisionTreePolicy parse_policy(const json& j) {
    if (!j.is_object()) fail("policy", "top level must be an object");
    check_keys(j, {"name", "thresholds", "phases", "description"}, "policy");
    DecisionTreePolicy p;
    if (j.contains("name")) {
        if (!j["name"].is_string()) fail("policy", "'name' must be a string");
        p.name = j["name"].get<std::string>();
    }
    if (j.contains("description")) {
        if (!j["description"].is_string()) fail("policy", "'description' must be a string");
        p.description = j["description"].get<std::string>();
    }
    if (j.contains("thresholds")) {
        const json& t = j["thresholds"];
        if (!t.is_array()) fail("policy", "'thresholds' must be an array");
        std::vector<double> values;
        for (const auto& v : t) {
            if (!v.is_number()) fail("policy", "thresholds must be numbers");
            values.push_back(v.get<double>());
        }
        p.thresholds = PhaseThresholds(values);
    }
    if (!j.contains("phases") || !j["phases"].is_array() || j["phases"].size() != 5)
        fail("policy", "'phases' must be an array of exactly five trees");
    for (int i = 0; i < 5; ++i) {
        TreeBuilder b(i + 1);
        b.build(j["phases"][static_cast<size_t>(i)], 0);
        p.phases[static_cast<size_t>(i)] = b.take();
    }
    return p;
}

DecisionTreePolicy parse_policy_text(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::invalid_policy, "policy is not valid JSON");
    return parse_policy(j);
}

DecisionTreePolicy load_policy(const std::filesystem::path& path) { return parse_policy_text(read_file(path)); }

json policy_to_json(const DecisionTreePolicy& p) {
    json phases = json::array();
    for (const auto& tree : p.phases) phases.push_back(node_json(tree, 0));
    const auto& t = p.thresholds.values();
    return {{"name", p.name},
            {"description", p.description},
            {"thresholds", json(std::vector<double>(t.begin(), t.end()))}, {"phases", phases}};
}

std::string_view reference_policy_text() { return kReferencePolicy; }

DecisionTreePolicy reference_policy() { return parse_policy_text(kReferencePolicy); }

}  // namespace hmt::agent

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmt/common/geometry.hpp"
#include "hmt/llm/client.hpp"
#include "hmt/world/types.hpp"

namespace hmt::command {

using nlohmann::json;

// Closed skill library. Arguments by skill:
//   go_to          landmark | cell
//   mine           material (one block from the nearest tower)
//   craft          item ("pickaxe")
//   chest_deposit  material, n
//   chest_withdraw material, n
//   place          material, cell
//   say            text
struct SkillCall {
    enum class Skill { go_to, mine, craft, chest_deposit, chest_withdraw, place, say };

    Skill skill = Skill::say;
    std::string landmark;
    std::optional<Voxel> cell;
    world::Material material;
    int n = 0;
    std::string item;
    std::string text;

    bool operator==(const SkillCall&) const = default;
};

std::string_view to_string(SkillCall::Skill s);
json to_json(const SkillCall& call);
std::string describe(const SkillCall& call);

// Goals and constraints from the agent's context file. Lines of the form
// "forbid: <skill>" remove a skill from the library; everything else is
// free text handed to the language model.
struct AgentContext {
    std::string text;
    std::set<SkillCall::Skill> forbidden;
    // Materials that exist in the world; empty accepts any name.
    std::set<world::Material> materials;
};

AgentContext parse_context(std::string_view text);
AgentContext load_context_file(const std::filesystem::path& path);  // throws missing_file

// Validates one JSON skill call; returns it or an error message.
struct Validated {
    std::optional<SkillCall> call;
    std::string error;
};
Validated validate_skill(const json& j, const AgentContext& context);

struct Interpretation {
    std::string reply;
    std::vector<SkillCall> skills;
    std::string source;  // "rules", "llm" or "llm_retry"
};

// Deterministic verb-object-quantity grammar, e.g.
// "get 5 wood and put it in the chest".
Interpretation parse_rules(std::string_view text, const AgentContext& context);

// Model first (with one corrective retry), rule parser as the fallback.
// Throws Error(empty_query) on blank text.
Interpretation interpret_command(std::string_view text, const std::string& world_summary,
                                 llm::LanguageModelClient* model, const AgentContext& context);

struct ConversationEntry {
    double sim_time = 0.0;
    std::string speaker;  // "human" or "ai"
    std::string text;
    std::vector<SkillCall> resolved_skills;
};

struct ConversationRecord {
    std::vector<ConversationEntry> entries;
    json to_json() const;
};

}  // namespace hmt::command

#include "hmt/command/command_agent.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"

namespace hmt::command {

namespace {

using Skill = SkillCall::Skill;

constexpr std::pair<Skill, std::string_view> kSkillNames[] = {
    {Skill::go_to, "go_to"},
    {Skill::mine, "mine"},
    {Skill::craft, "craft"},
    {Skill::chest_deposit, "chest_deposit"},
    {Skill::chest_withdraw, "chest_withdraw"},
    {Skill::place, "place"},
    {Skill::say, "say"},
};

std::optional<Skill> skill_from_string(std::string_view s) {
    for (const auto& [k, name] : kSkillNames)
        if (name == s) return k;
    return std::nullopt;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

const std::set<std::string> kLandmarks = {"crafting_table", "chest", "plan_centroid"};

bool valid_landmark(const std::string& l) {
    return kLandmarks.count(l) || (l.size() > 6 && l.find("_tower") != std::string::npos);
}

SkillCall make(Skill s) {
    SkillCall c;
    c.skill = s;
    return c;
}

}  // namespace

std::string_view to_string(Skill s) {
    for (const auto& [k, name] : kSkillNames)
        if (k == s) return name;
    return "?";
}

json to_json(const SkillCall& c) {
    json args = json::object();
    switch (c.skill) {
        case Skill::go_to:
            if (c.cell) args["cell"] = {{"x", c.cell->x}, {"y", c.cell->y}};
            else args["landmark"] = c.landmark;
            break;
        case Skill::mine: args["material"] = c.material; break;
        case Skill::craft: args["item"] = c.item; break;
        case Skill::chest_deposit:
        case Skill::chest_withdraw:
            args["material"] = c.material;
            args["n"] = c.n;
            break;
        case Skill::place:
            args["material"] = c.material;
            args["cell"] = {{"x", c.cell ? c.cell->x : 0}, {"y", c.cell ? c.cell->y : 0}};
            break;
        case Skill::say: args["text"] = c.text; break;
    }
    return {{"skill", to_string(c.skill)}, {"args", args}};
}

std::string describe(const SkillCall& c) {
    switch (c.skill) {
        case Skill::go_to: return "go_to(" + (c.cell ? to_string(*c.cell) : c.landmark) + ")";
        case Skill::mine: return "mine(" + c.material + ")";
        case Skill::craft: return "craft(" + c.item + ")";
        case Skill::chest_deposit: return "chest_deposit(" + c.material + "," + std::to_string(c.n) + ")";
        case Skill::chest_withdraw: return "chest_withdraw(" + c.material + "," + std::to_string(c.n) + ")";
        case Skill::place: return "place(" + c.material + "," + (c.cell ? to_string(*c.cell) : "?") + ")";
        case Skill::say: return "say(\"" + c.text + "\")";
    }
    return "?";
}

AgentContext parse_context(std::string_view text) {
    AgentContext ctx;
    ctx.text = std::string(text);
    std::istringstream in{std::string(text)};
    std::string line;
    static const std::regex forbid(R"(^\s*forbid\s*:\s*([a-z_]+)\s*$)", std::regex::icase);
    while (std::getline(in, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, forbid)) continue;
        const auto s = skill_from_string(lower(m[1].str()));
        if (!s) throw Error(Errc::invalid_config, "context forbids unknown skill '" + m[1].str() + "'");
        ctx.forbidden.insert(*s);
    }
    return ctx;
}

AgentContext load_context_file(const std::filesystem::path& path) { return parse_context(read_file(path)); }

Validated validate_skill(const json& j, const AgentContext& context) {
    auto fail = [](std::string e) { return Validated{std::nullopt, std::move(e)}; };
    if (!j.is_object()) return fail("each skill call must be an object");
    for (const auto& [k, v] : j.items())
        if (k != "skill" && k != "args") return fail("unexpected key '" + k + "' in skill call");
    if (!j.contains("skill") || !j["skill"].is_string()) return fail("skill call needs a 'skill' name");
    const auto name = j["skill"].get<std::string>();
    const auto skill = skill_from_string(name);
    if (!skill) return fail("unknown skill '" + name + "'");
    if (context.forbidden.count(*skill)) return fail("skill '" + name + "' is forbidden by the context file");
    const json args = j.value("args", json::object());
    if (!args.is_object()) return fail("'args' must be an object");

    auto allowed = [&](std::initializer_list<std::string_view> keys) -> std::optional<std::string> {
        for (const auto& [k, v] : args.items())
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                return "unexpected argument '" + k + "' for " + name;
        return std::nullopt;
    };
    auto material = [&](SkillCall& c) -> std::optional<std::string> {
        if (!args.contains("material") || !args["material"].is_string() || args["material"].get<std::string>().empty())
            return name + " needs a 'material' string";
        c.material = args["material"].get<std::string>();
        if (!context.materials.empty() && !context.materials.count(c.material))
            return "unknown material '" + c.material + "'";
        return std::nullopt;
    };
    auto cell = [&](SkillCall& c) -> std::optional<std::string> {
        const json& v = args["cell"];
        if (!v.is_object() || !v.contains("x") || !v.contains("y") || !v["x"].is_number_integer() ||
            !v["y"].is_number_integer() || v.size() != 2)
            return name + " needs 'cell' as {x, y} integers";
        c.cell = Voxel{v["x"].get<int>(), v["y"].get<int>()};
        return std::nullopt;
    };

    SkillCall c = make(*skill);
    std::optional<std::string> err;
    switch (*skill) {
        case Skill::go_to:
            if ((err = allowed({"landmark", "cell"}))) break;
            if (args.contains("cell") == args.contains("landmark")) {
                err = "go_to needs exactly one of 'landmark' or 'cell'";
                break;
            }
            if (args.contains("cell")) {
                err = cell(c);
            } else if (!args["landmark"].is_string() || !valid_landmark(args["landmark"].get<std::string>())) {
                err = "go_to landmark must be a tower, crafting_table, chest or plan_centroid";
            } else {
                c.landmark = args["landmark"].get<std::string>();
            }
            break;
        case Skill::mine:
            if (!(err = allowed({"material"}))) err = material(c);
            break;
        case Skill::craft:
            if ((err = allowed({"item"}))) break;
            if (!args.contains("item") || args["item"] != "pickaxe") err = "craft supports only item 'pickaxe'";
            else c.item = "pickaxe";
            break;
        case Skill::chest_deposit:
        case Skill::chest_withdraw:
            if ((err = allowed({"material", "n"})) || (err = material(c))) break;
            if (!args.contains("n") || !args["n"].is_number_integer() || args["n"].get<int>() < 1)
                err = name + " needs a positive integer 'n'";
            else c.n = args["n"].get<int>();
            break;
        case Skill::place:
            if ((err = allowed({"material", "cell"})) || (err = material(c))) break;
            if (!args.contains("cell")) err = "place needs 'cell'";
            else err = cell(c);
            break;
        case Skill::say:
            if ((err = allowed({"text"}))) break;
            if (!args.contains("text") || !args["text"].is_string()) err = "say needs 'text'";
            else c.text = args["text"].get<std::string>();
            break;
    }
    if (err) return fail(*err);
    return {c, {}};
}

Interpretation parse_rules(std::string_view raw, const AgentContext& context) {
    Interpretation out;
    out.source = "rules";
    const std::string text = lower(raw);
    static const std::regex splitter(R"(\s*(?:,(?!\s*-?\d)|;|\.(?!\d)|\band then\b|\bthen\b|\band\b)\s*)");
    std::vector<std::string> clauses;
    for (std::sregex_token_iterator it(text.begin(), text.end(), splitter, -1), end; it != end; ++it) {
        std::string c = trim(it->str());
        if (!c.empty()) clauses.push_back(c);
    }

    static const std::string mat = "(wood|stone|brick|[a-z]+)";
    static const std::regex gather(R"(^(?:please\s+)?(?:get|gather|mine|collect|fetch|bring)\s+(?:me\s+)?(\d+|some|a|an|one)?\s*(wood|stone|brick)(?:\s+blocks?)?$)");
    static const std::regex deposit(R"(^(?:put|store|deposit|place|drop|leave)\s+(?:it|them|(\d+|all)?\s*(wood|stone|brick)?(?:\s+blocks?)?)\s+(?:in|into)\s+(?:the\s+)?chest$)");
    static const std::regex deposit_short(R"(^deposit\s+(\d+|all)?\s*(wood|stone|brick)$)");
    static const std::regex withdraw(R"(^(?:take|withdraw|grab|get)\s+(\d+)\s+(wood|stone|brick)(?:\s+blocks?)?\s+(?:out\s+)?(?:of|from)\s+(?:the\s+)?chest$)");
    static const std::regex craft(R"(^(?:craft|make|build)\s+(?:a\s+|yourself\s+a\s+)?pickaxe$)");
    static const std::regex go(R"(^(?:go|walk|move|head|come)\s+(?:over\s+)?(?:to|back to)\s+(?:the\s+)?(.+)$)");
    static const std::regex place(R"(^place\s+(?:a\s+)?(wood|stone|brick)(?:\s+block)?\s+at\s+(-?\d+)\s*[, ]\s*(-?\d+)$)");
    static const std::regex say(R"(^say\s+(.+)$)");
    (void)mat;

    std::string last_material;
    int last_count = 0;
    bool understood_any = false;
    auto count_of = [](const std::string& s) {
        if (s.empty() || s == "a" || s == "an" || s == "one") return 1;
        if (s == "some") return 5;
        return std::stoi(s);
    };
    auto push = [&](SkillCall c) { out.skills.push_back(std::move(c)); };

    for (const auto& clause : clauses) {
        std::smatch m;
        if (std::regex_match(clause, m, withdraw)) {
            SkillCall g = make(Skill::go_to);
            g.landmark = "chest";
            push(g);
            SkillCall w = make(Skill::chest_withdraw);
            w.material = m[2];
            w.n = std::stoi(m[1]);
            push(w);
            last_material = w.material;
            last_count = w.n;
        } else if (std::regex_match(clause, m, gather)) {
            const int n = count_of(m[1]);
            SkillCall g = make(Skill::go_to);
            g.landmark = m[2].str() + "_tower";
            push(g);
            for (int i = 0; i < n; ++i) {
                SkillCall mine = make(Skill::mine);
                mine.material = m[2];
                push(mine);
            }
            last_material = m[2];
            last_count = n;
        } else if (std::regex_match(clause, m, deposit) || std::regex_match(clause, m, deposit_short)) {
            std::string material = m[2].matched ? m[2].str() : last_material;
            if (material.empty()) continue;
            int n = last_count;
            if (m[1].matched && m[1] != "all") n = std::stoi(m[1]);
            if (n <= 0) n = 1;
            SkillCall g = make(Skill::go_to);
            g.landmark = "chest";
            push(g);
            SkillCall d = make(Skill::chest_deposit);
            d.material = material;
            d.n = n;
            push(d);
        } else if (std::regex_match(clause, m, craft)) {
            SkillCall g = make(Skill::go_to);
            g.landmark = "crafting_table";
            push(g);
            SkillCall c = make(Skill::craft);
            c.item = "pickaxe";
            push(c);
        } else if (std::regex_match(clause, m, place)) {
            SkillCall p = make(Skill::place);
            p.material = m[1];
            p.cell = Voxel{std::stoi(m[2]), std::stoi(m[3])};
            push(p);
        } else if (std::regex_match(clause, m, go)) {
            std::string where = trim(m[1].str());
            static const std::regex tower(R"(^(wood|stone|brick)\s+tower$)");
            std::smatch t;
            if (where == "chest") where = "chest";
            else if (where == "table" || where == "crafting table") where = "crafting_table";
            else if (where == "house" || where == "plan" || where == "build site") where = "plan_centroid";
            else if (std::regex_match(where, t, tower)) where = t[1].str() + "_tower";
            else continue;
            SkillCall g = make(Skill::go_to);
            g.landmark = where;
            push(g);
        } else if (std::regex_match(clause, m, say)) {
            SkillCall s = make(Skill::say);
            s.text = trim(std::string_view(raw).substr(raw.size() - m[1].length()));
            push(s);
        } else {
            continue;
        }
        understood_any = true;
    }

    // The context file has the last word on what may run.
    std::vector<SkillCall> allowed;
    std::vector<std::string> dropped;
    for (auto& c : out.skills) {
        if (context.forbidden.count(c.skill)) dropped.emplace_back(to_string(c.skill));
        else allowed.push_back(std::move(c));
    }
    out.skills = std::move(allowed);

    if (!understood_any) {
        out.reply = "Sorry, I did not understand that. Try something like \"get 5 wood and put it in the chest\".";
    } else if (out.skills.empty()) {
        out.reply = "I am not allowed to do that (" + dropped.front() + " is forbidden).";
    } else {
        out.reply = "On it: ";
        for (size_t i = 0; i < out.skills.size(); ++i) out.reply += (i ? ", " : "") + describe(out.skills[i]);
        out.reply += ".";
    }
    return out;
}

namespace {

std::string system_prompt(const AgentContext& context, const std::string& world_summary) {
    std::string s;
    if (!context.text.empty()) s += context.text + "\n\n";
    s += "You control an AI teammate in a block-building mission. Translate the human's message into skill calls.\n"
         "Reply with JSON only: {\"reply\": \"<short answer to the human>\", \"skills\": [<skill calls>]}.\n"
         "Skill calls look like {\"skill\": name, \"args\": {...}}. Available skills:\n";
    const std::pair<Skill, std::string_view> docs[] = {
        {Skill::go_to, "go_to {landmark: wood_tower|stone_tower|brick_tower|crafting_table|chest|plan_centroid} or {cell: {x, y}}"},
        {Skill::mine, "mine {material} mines one block from the nearest tower of that material"},
        {Skill::craft, "craft {item: \"pickaxe\"} at the crafting table"},
        {Skill::chest_deposit, "chest_deposit {material, n}"},
        {Skill::chest_withdraw, "chest_withdraw {material, n}"},
        {Skill::place, "place {material, cell: {x, y}} on a floor-plan cell"},
        {Skill::say, "say {text}"},
    };
    for (const auto& [k, doc] : docs)
        if (!context.forbidden.count(k)) s += "- " + std::string(doc) + "\n";
    s += "Use an empty skills list when nothing should be done.\n\nCurrent world:\n" + world_summary + "\n";
    return s;
}

// Parses and validates a model reply; returns an error message on failure.
std::optional<std::string> accept_model_output(const std::string& raw, const AgentContext& context, Interpretation& out) {
    std::string text = raw;
    // Tolerate a fenced block around the JSON.
    if (const auto open = text.find('{'); open != std::string::npos) {
        const auto close = text.rfind('}');
        if (close != std::string::npos && close > open) text = text.substr(open, close - open + 1);
    }
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return "output is not a JSON object";
    if (!j.contains("reply") || !j["reply"].is_string()) return "output needs a 'reply' string";
    if (!j.contains("skills") || !j["skills"].is_array()) return "output needs a 'skills' array";
    std::vector<SkillCall> skills;
    for (size_t i = 0; i < j["skills"].size(); ++i) {
        auto v = validate_skill(j["skills"][i], context);
        if (!v.call) return "skills[" + std::to_string(i) + "]: " + v.error;
        skills.push_back(*v.call);
    }
    out.reply = j["reply"].get<std::string>();
    out.skills = std::move(skills);
    return std::nullopt;
}

}  // namespace

Interpretation interpret_command(std::string_view text, const std::string& world_summary,
                                 llm::LanguageModelClient* model, const AgentContext& context) {
    if (trim(text).empty()) throw Error(Errc::empty_query, "command text is empty");
    if (!model) return parse_rules(text, context);

    std::vector<llm::Message> messages{{"system", system_prompt(context, world_summary)}, {"user", std::string(text)}};
    try {
        Interpretation out;
        std::string reply = model->complete(messages);
        auto error = accept_model_output(reply, context, out);
        if (!error) {
            out.source = "llm";
            return out;
        }
        messages.push_back({"assistant", reply});
        messages.push_back({"user", "Your previous output was rejected: " + *error +
                                        ". Answer again with corrected JSON only."});
        reply = model->complete(messages);
        error = accept_model_output(reply, context, out);
        if (!error) {
            out.source = "llm_retry";
            return out;
        }
    } catch (const Error& e) {
        if (e.code() != Errc::llm_unavailable) throw;
    }
    return parse_rules(text, context);
}

json ConversationRecord::to_json() const {
    json entries_json = json::array();
    for (const auto& e : entries) {
        json skills = json::array();
        for (const auto& s : e.resolved_skills) skills.push_back(command::to_json(s));
        entries_json.push_back(
            {{"sim_time", e.sim_time}, {"speaker", e.speaker}, {"text", e.text}, {"resolved_skills", skills}});
    }
    return {{"entries", entries_json}};
}

}  // namespace hmt::command

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hmt/command/command_agent.hpp"
#include "hmt/common/error.hpp"

using namespace hmt;
using namespace hmt::command;
using Skill = SkillCall::Skill;
using nlohmann::json;

namespace {

// Hand-written expectation builder, independent of the parser's internals.
std::vector<json> expect(std::initializer_list<json> calls) { return calls; }

std::vector<json> as_json(const std::vector<SkillCall>& calls) {
    std::vector<json> out;
    for (const auto& c : calls) out.push_back(to_json(c));
    return out;
}

json go(const std::string& landmark) { return {{"skill", "go_to"}, {"args", {{"landmark", landmark}}}}; }
json mine(const std::string& m) { return {{"skill", "mine"}, {"args", {{"material", m}}}}; }
json deposit(const std::string& m, int n) { return {{"skill", "chest_deposit"}, {"args", {{"material", m}, {"n", n}}}}; }
json withdraw(const std::string& m, int n) {
    return {{"skill", "chest_withdraw"}, {"args", {{"material", m}, {"n", n}}}};
}

std::string reply_json(std::initializer_list<json> skills) {
    return json{{"reply", "ok"}, {"skills", json(std::vector<json>(skills))}}.dump();
}

}  // namespace

TEST(RuleParser, GatherAndDeposit) {
    const auto r = parse_rules("get 5 wood and put it in the chest", {});
    EXPECT_EQ(r.source, "rules");
    EXPECT_EQ(as_json(r.skills), expect({go("wood_tower"), mine("wood"), mine("wood"), mine("wood"), mine("wood"),
                                         mine("wood"), go("chest"), deposit("wood", 5)}));
}

TEST(RuleParser, SentenceTable) {
    struct Case {
        std::string text;
        std::vector<json> skills;
    };
    const std::vector<Case> cases = {
        {"Gather 2 stone", {go("stone_tower"), mine("stone"), mine("stone")}},
        {"mine a brick", {go("brick_tower"), mine("brick")}},
        {"take 4 wood from the chest", {go("chest"), withdraw("wood", 4)}},
        {"craft a pickaxe", {go("crafting_table"), {{"skill", "craft"}, {"args", {{"item", "pickaxe"}}}}}},
        {"go to the stone tower", {go("stone_tower")}},
        {"walk to the table", {go("crafting_table")}},
        {"head to the house", {go("plan_centroid")}},
        {"deposit 3 brick", {go("chest"), deposit("brick", 3)}},
        {"get 1 stone, then go to the chest; deposit all stone",
         {go("stone_tower"), mine("stone"), go("chest"), go("chest"), deposit("stone", 1)}},
        {"place a wood block at 9, 8",
         {{{"skill", "place"}, {"args", {{"material", "wood"}, {"cell", {{"x", 9}, {"y", 8}}}}}}}},
        {"say Hello There", {{{"skill", "say"}, {"args", {{"text", "Hello There"}}}}}},
    };
    for (const auto& c : cases) EXPECT_EQ(as_json(parse_rules(c.text, {}).skills), c.skills) << c.text;
}

TEST(RuleParser, UnknownInputAsksForClarification) {
    const auto r = parse_rules("dance a little jig", {});
    EXPECT_TRUE(r.skills.empty());
    EXPECT_NE(r.reply.find("did not understand"), std::string::npos);
}

TEST(RuleParser, ForbiddenSkillsAreDropped) {
    const auto ctx = parse_context("Be helpful.\nforbid: place\n");
    EXPECT_EQ(ctx.forbidden, std::set<Skill>{Skill::place});
    EXPECT_NE(ctx.text.find("Be helpful."), std::string::npos);
    const auto r = parse_rules("place a stone at 10 11", ctx);
    EXPECT_TRUE(r.skills.empty());
    EXPECT_NE(r.reply.find("forbidden"), std::string::npos);
}

TEST(Validator, AcceptsWellFormedCalls) {
    for (const json& j : {go("chest"), mine("stone"), deposit("wood", 2), withdraw("brick", 1),
                          json{{"skill", "go_to"}, {"args", {{"cell", {{"x", 3}, {"y", 4}}}}}}}) {
        const auto v = validate_skill(j, {});
        ASSERT_TRUE(v.call.has_value()) << j.dump() << ": " << v.error;
        EXPECT_EQ(to_json(*v.call), j);
    }
}

TEST(Validator, RejectsMalformedCalls) {
    const std::vector<json> bad = {
        json::array(),
        {{"skill", "fly"}, {"args", json::object()}},
        {{"skill", "mine"}},
        {{"skill", "mine"}, {"args", {{"material", "wood"}, {"speed", 2}}}},
        {{"skill", "go_to"}, {"args", {{"landmark", "moon"}}}},
        {{"skill", "go_to"}, {"args", {{"landmark", "chest"}, {"cell", {{"x", 1}, {"y", 1}}}}}},
        {{"skill", "chest_deposit"}, {"args", {{"material", "wood"}, {"n", 0}}}},
        {{"skill", "craft"}, {"args", {{"item", "sword"}}}},
        {{"skill", "place"}, {"args", {{"material", "wood"}}}},
    };
    for (const auto& j : bad) {
        const auto v = validate_skill(j, {});
        EXPECT_FALSE(v.call.has_value()) << j.dump();
        EXPECT_FALSE(v.error.empty()) << j.dump();
    }
    AgentContext no_place;
    no_place.forbidden.insert(Skill::place);
    EXPECT_FALSE(validate_skill({{"skill", "place"}, {"args", {{"material", "wood"}, {"cell", {{"x", 9}, {"y", 8}}}}}},
                                no_place)
                     .call);
}

TEST(Interpret, UsesModelOutputWhenValid) {
    llm::MockLanguageModel model(json{{"sequence", {reply_json({go("brick_tower")})}}});
    const auto r = interpret_command("go somewhere useful", "world", &model, {});
    EXPECT_EQ(r.source, "llm");
    EXPECT_EQ(as_json(r.skills), expect({go("brick_tower")}));
    ASSERT_EQ(model.calls().size(), 1u);
    EXPECT_EQ(model.calls()[0].back().content, "go somewhere useful");
}

TEST(Interpret, RetriesOnceWithTheValidationError) {
    llm::MockLanguageModel model(json{{"sequence", {reply_json({mine("gold")}), reply_json({mine("stone")})}}});
    AgentContext ctx;
    ctx.materials = {"wood", "stone", "brick"};
    const auto r = interpret_command("get stone", "world", &model, ctx);
    EXPECT_EQ(r.source, "llm_retry");
    EXPECT_EQ(as_json(r.skills), expect({mine("stone")}));
    ASSERT_EQ(model.calls().size(), 2u);
    EXPECT_NE(model.calls()[1].back().content.find("rejected"), std::string::npos);
}

TEST(Interpret, FallsBackToRulesAfterTwoBadReplies) {
    llm::MockLanguageModel model(json{{"sequence", {"not json", "{\"reply\": 3}"}}});
    const auto r = interpret_command("get 2 wood", "world", &model, {});
    EXPECT_EQ(r.source, "rules");
    EXPECT_EQ(as_json(r.skills), expect({go("wood_tower"), mine("wood"), mine("wood")}));
}

TEST(Interpret, FallsBackToRulesWhenModelUnavailable) {
    llm::MockLanguageModel model(json{{"unavailable", true}});
    const auto r = interpret_command("get 1 brick", "world", &model, {});
    EXPECT_EQ(r.source, "rules");
    EXPECT_EQ(r.skills.size(), 2u);
}

TEST(Interpret, ModelCannotUseForbiddenSkill) {
    AgentContext ctx;
    ctx.forbidden.insert(Skill::place);
    const std::string placing = reply_json({{{"skill", "place"}, {"args", {{"material", "wood"}, {"cell", {{"x", 9}, {"y", 8}}}}}}});
    llm::MockLanguageModel model(json{{"sequence", {placing, placing}}});
    const auto r = interpret_command("build the wall", "world", &model, ctx);
    for (const auto& s : r.skills) EXPECT_NE(s.skill, Skill::place);
    EXPECT_EQ(model.calls()[0][0].content.find("place {material"), std::string::npos);
}

TEST(Interpret, EmptyTextIsRejected) {
    try {
        interpret_command("   ", "", nullptr, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::empty_query);
    }
}

TEST(Context, MissingFileIsReported) {
    try {
        load_context_file("/nonexistent/context.md");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::missing_file);
    }
    const auto path = std::filesystem::temp_directory_path() / "hmt_command_test_context.md";
    std::ofstream(path) << "Focus on stone.\nforbid: craft\n";
    const auto ctx = load_context_file(path);
    EXPECT_TRUE(ctx.forbidden.count(Skill::craft));
    EXPECT_NE(ctx.text.find("Focus on stone."), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Conversation, SerializesEntries) {
    ConversationRecord rec;
    rec.entries.push_back({1.5, "human", "get 1 wood", parse_rules("get 1 wood", {}).skills});
    rec.entries.push_back({1.5, "ai", "On it", {}});
    const json j = rec.to_json();
    ASSERT_EQ(j["entries"].size(), 2u);
    EXPECT_EQ(j["entries"][0]["resolved_skills"].size(), 2u);
    EXPECT_EQ(j["entries"][0]["speaker"], "human");
    EXPECT_EQ(j["entries"][1]["sim_time"], 1.5);
}

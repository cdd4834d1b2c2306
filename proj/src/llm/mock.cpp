#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/llm/client.hpp"

namespace hmt::llm {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

const Message* last_user(const std::vector<Message>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
        if (it->role == "user") return &*it;
    return nullptr;
}

// Parses the first JSON value that follows `marker` in any message.
std::optional<json> embedded_json(const std::vector<Message>& messages, std::string_view marker) {
    for (const auto& m : messages) {
        const auto at = m.content.find(marker);
        if (at == std::string::npos) continue;
        const auto start = m.content.find_first_of("{[", at + marker.size());
        if (start == std::string::npos) continue;
        // The data block ends at the closing fence when there is one.
        const auto fence = m.content.find("\n```", start);
        const std::string body = m.content.substr(start, fence == std::string::npos ? std::string::npos : fence - start);
        json j = json::parse(body, nullptr, false);
        if (!j.is_discarded()) return j;
    }
    return std::nullopt;
}

std::optional<double> find_time(const std::string& text) {
    static const std::regex with_t(R"(t\s*=\s*([0-9]+(?:\.[0-9]+)?))", std::regex::icase);
    static const std::regex with_s(R"(([0-9]+(?:\.[0-9]+)?)\s*(?:s\b|sec|second))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(text, m, with_t)) return std::stod(m[1]);
    if (std::regex_search(text, m, with_s)) return std::stod(m[1]);
    return std::nullopt;
}

}  // namespace

MockLanguageModel::MockLanguageModel(const json& script) {
    if (!script.is_object()) throw Error(Errc::invalid_config, "mock LLM script must be a JSON object");
    if (script.contains("sequence"))
        for (const auto& s : script["sequence"]) sequence_.push_back(s.get<std::string>());
    if (script.contains("rules"))
        for (const auto& r : script["rules"]) {
            Rule rule;
            rule.contains = lower(r.value("contains", ""));
            rule.reply = r.value("reply", "");
            rule.responder = r.value("responder", "");
            if (!rule.responder.empty() && rule.responder != "phase_lookup")
                throw Error(Errc::invalid_config, "unknown mock responder '" + rule.responder + "'");
            rules_.push_back(std::move(rule));
        }
    default_reply_ = script.value("default", "I can only answer questions about the mission timeline.");
    unavailable_ = script.value("unavailable", false);
}

std::shared_ptr<MockLanguageModel> MockLanguageModel::from_file(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(Errc::invalid_config, "mock LLM script " + path + " is not valid JSON");
    return std::make_shared<MockLanguageModel>(j);
}

json MockLanguageModel::default_script() {
    return {{"rules", json::array({{{"contains", "phase"}, {"responder", "phase_lookup"}}})},
            {"default", "This offline model answers phase questions only, for example: what phase was the AI in at t=30?"}};
}

std::string MockLanguageModel::complete(const std::vector<Message>& messages) {
    std::lock_guard lock(mu_);
    calls_.push_back(messages);
    if (unavailable_) throw Error(Errc::llm_unavailable, "mock model configured as unavailable");
    if (!sequence_.empty()) {
        std::string reply = std::move(sequence_.front());
        sequence_.pop_front();
        return reply;
    }
    const Message* user = last_user(messages);
    const std::string text = user ? lower(user->content) : std::string();
    for (const auto& r : rules_) {
        if (text.find(r.contains) == std::string::npos) continue;
        if (r.responder == "phase_lookup") return phase_lookup_response(messages);
        return r.reply;
    }
    return default_reply_;
}

std::string phase_lookup_response(const std::vector<Message>& messages) {
    const Message* user = last_user(messages);
    std::optional<double> t;
    if (user) {
        // The playhead line rides along with the question; only a time named
        // in the question itself overrides it.
        static const std::regex playhead_line(R"(Playhead:[^\n]*)");
        t = find_time(std::regex_replace(user->content, playhead_line, ""));
    }
    if (!t) {
        for (const auto& m : messages) {
            static const std::regex playhead(R"(Playhead:\s*t=([0-9]+(?:\.[0-9]+)?) s)");
            std::smatch match;
            if (std::regex_search(m.content, match, playhead)) t = std::stod(match[1]);
        }
    }
    if (!t) return "I could not tell which time you mean.";

    const auto timeline = embedded_json(messages, "Mission timeline data");
    if (!timeline || !timeline->contains("events")) return "The timeline data is missing from my context.";
    int phase = 1;
    for (const auto& e : (*timeline)["events"]) {
        if (e["timestamp"].get<double>() > *t) break;
        const auto& a = e["action"];
        if (a.contains("world") && a["world"].contains("phase")) phase = a["world"]["phase"].get<int>();
    }
    return "At t=" + format_seconds(*t) + " s the mission was in phase " + std::to_string(phase) + ".";
}

}  // namespace hmt::llm

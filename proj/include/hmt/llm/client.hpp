#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hmt::llm {

struct Message {
    std::string role;  // "system", "user" or "assistant"
    std::string content;

    bool operator==(const Message&) const = default;
};

class LanguageModelClient {
public:
    virtual ~LanguageModelClient() = default;
    // Throws Error(llm_unavailable) when no answer can be obtained.
    virtual std::string complete(const std::vector<Message>& messages) = 0;
};

// Deterministic scripted model for tests and offline runs. Script format:
//   {"sequence": ["first reply", ...],
//    "rules": [{"contains": "phase", "responder": "phase_lookup"},
//              {"contains": "hello", "reply": "hi"}],
//    "default": "fallback reply",
//    "unavailable": false}
// Queued sequence replies are used first; then the first rule whose
// `contains` text (case-insensitive) appears in the last user message.
class MockLanguageModel : public LanguageModelClient {
public:
    explicit MockLanguageModel(const nlohmann::json& script);
    static std::shared_ptr<MockLanguageModel> from_file(const std::string& path);
    // The built-in script used by `--mock-llm` without a file.
    static nlohmann::json default_script();

    std::string complete(const std::vector<Message>& messages) override;

    const std::vector<std::vector<Message>>& calls() const { return calls_; }

private:
    struct Rule {
        std::string contains;
        std::string reply;
        std::string responder;
    };

    std::deque<std::string> sequence_;
    std::vector<Rule> rules_;
    std::string default_reply_;
    bool unavailable_ = false;
    std::vector<std::vector<Message>> calls_;
    std::mutex mu_;
};

// Answers "what phase ... at t=X" by reading the timeline embedded in the
// prompt. Falls back to the playhead line when the query names no time.
std::string phase_lookup_response(const std::vector<Message>& messages);

// OpenAI-style chat completions over HTTP(S).
class HttpLanguageModel : public LanguageModelClient {
public:
    HttpLanguageModel(std::string endpoint, std::string api_key, std::string model = "default");
    // Reads LLM_ENDPOINT and LLM_API_KEY; returns nullptr when no endpoint is set.
    static std::unique_ptr<HttpLanguageModel> from_environment();

    std::string complete(const std::vector<Message>& messages) override;

private:
    std::string endpoint_;
    std::string api_key_;
    std::string model_;
};

}  // namespace hmt::llm

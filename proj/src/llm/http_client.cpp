#include <cstdlib>

#include <httplib.h>

#include "hmt/common/error.hpp"
#include "hmt/llm/client.hpp"

namespace hmt::llm {

using nlohmann::json;

HttpLanguageModel::HttpLanguageModel(std::string endpoint, std::string api_key, std::string model)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)) {}

std::unique_ptr<HttpLanguageModel> HttpLanguageModel::from_environment() {
    const char* endpoint = std::getenv("LLM_ENDPOINT");
    if (!endpoint || !*endpoint) return nullptr;
    const char* key = std::getenv("LLM_API_KEY");
    const char* model = std::getenv("LLM_MODEL");
    return std::make_unique<HttpLanguageModel>(endpoint, key ? key : "", model && *model ? model : "default");
}

std::string HttpLanguageModel::complete(const std::vector<Message>& messages) {
    // endpoint: scheme://host[:port]/path
    const auto scheme_end = endpoint_.find("://");
    if (scheme_end == std::string::npos) throw Error(Errc::llm_unavailable, "endpoint needs a scheme: " + endpoint_);
    const auto path_start = endpoint_.find('/', scheme_end + 3);
    const std::string base = endpoint_.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/v1/chat/completions" : endpoint_.substr(path_start);

    json body{{"model", model_}, {"messages", json::array()}};
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw Error(Errc::llm_unavailable, "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw Error(Errc::llm_unavailable, "HTTP " + std::to_string(res->status));
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw Error(Errc::llm_unavailable, "response is not JSON");
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw Error(Errc::llm_unavailable, "response has no choices[0].message.content");
    }
}

}  // namespace hmt::llm

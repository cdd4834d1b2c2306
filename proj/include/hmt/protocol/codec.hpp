#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hmt/agent/trace.hpp"
#include "hmt/protocol/messages.hpp"

namespace hmt::protocol {

using nlohmann::json;

// Wire frame: 4-byte big-endian body length followed by a UTF-8 JSON object
// {"v":1,"seq":..,"sim_time":..,"origin":"server"|"client","payload":{"type":..}}.
std::string encode(const Envelope& envelope);

// Throws Error(malformed_frame | unknown_variant | schema_version_mismatch).
Envelope decode(std::string_view frame);

// The JSON body alone; WebSocket transports carry one body per text message
// and let the WebSocket framing stand in for the length prefix.
std::string encode_body(const Envelope& envelope);
Envelope decode_body(std::string_view body);

// Incremental reader for byte streams carrying back-to-back frames.
class FrameReader {
public:
    void feed(std::string_view bytes);
    // Next complete frame, if any. Throws Error(malformed_frame) on an
    // impossible length header.
    std::optional<std::string> next();
    size_t buffered() const { return buffer_.size(); }

private:
    std::string buffer_;
};

json to_json(const agent::DecisionTrace& trace);
agent::DecisionTrace trace_from_json(const json& j);
json to_json(const WorldInfo& info);
WorldInfo world_info_from_json(const json& j);
json to_json(const AgentView& view);
AgentView agent_view_from_json(const json& j);
json to_json(const StateUpdate& update);
StateUpdate state_update_from_json(const json& j);

}  // namespace hmt::protocol

#include "hmt/common/error.hpp"

namespace hmt {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_config: return "invalid_config";
        case Errc::unknown_agent: return "unknown_agent";
        case Errc::out_of_reach: return "out_of_reach";
        case Errc::not_mineable: return "not_mineable";
        case Errc::inventory_full: return "inventory_full";
        case Errc::not_at_table: return "not_at_table";
        case Errc::insufficient_materials: return "insufficient_materials";
        case Errc::already_has_pickaxe: return "already_has_pickaxe";
        case Errc::chest_full: return "chest_full";
        case Errc::capability_denied: return "capability_denied";
        case Errc::wrong_material: return "wrong_material";
        case Errc::not_in_plan: return "not_in_plan";
        case Errc::occupied: return "occupied";
        case Errc::not_walkable: return "not_walkable";
        case Errc::unknown_item: return "unknown_item";
        case Errc::unreachable: return "unreachable";
        case Errc::invalid_endpoint: return "invalid_endpoint";
        case Errc::malformed_frame: return "malformed_frame";
        case Errc::unknown_variant: return "unknown_variant";
        case Errc::schema_version_mismatch: return "schema_version_mismatch";
        case Errc::join_rejected: return "join_rejected";
        case Errc::protocol_violation: return "protocol_violation";
        case Errc::mission_not_started: return "mission_not_started";
        case Errc::agent_left: return "agent_left";
        case Errc::already_open: return "already_open";
        case Errc::not_open: return "not_open";
        case Errc::io_failure: return "io_failure";
        case Errc::schema_invalid: return "schema_invalid";
        case Errc::t_out_of_range: return "t_out_of_range";
        case Errc::unknown_viewpoint: return "unknown_viewpoint";
        case Errc::mission_not_found: return "mission_not_found";
        case Errc::context_missing: return "context_missing";
        case Errc::session_not_found: return "session_not_found";
        case Errc::llm_unavailable: return "llm_unavailable";
        case Errc::empty_query: return "empty_query";
        case Errc::missing_file: return "missing_file";
        case Errc::invalid_policy: return "invalid_policy";
        case Errc::connection_lost: return "connection_lost";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(detail) {}

}  // namespace hmt

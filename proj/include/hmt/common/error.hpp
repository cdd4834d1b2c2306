#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmt {

// Error codes shared by every module. The snake_case spelling returned by
// to_string() is what travels on the wire and in HTTP error bodies.
enum class Errc {
    invalid_config,
    unknown_agent,
    out_of_reach,
    not_mineable,
    inventory_full,
    not_at_table,
    insufficient_materials,
    already_has_pickaxe,
    chest_full,
    capability_denied,
    wrong_material,
    not_in_plan,
    occupied,
    not_walkable,
    unknown_item,
    unreachable,
    invalid_endpoint,
    malformed_frame,
    unknown_variant,
    schema_version_mismatch,
    join_rejected,
    protocol_violation,
    mission_not_started,
    agent_left,
    already_open,
    not_open,
    io_failure,
    schema_invalid,
    t_out_of_range,
    unknown_viewpoint,
    mission_not_found,
    context_missing,
    session_not_found,
    llm_unavailable,
    empty_query,
    missing_file,
    invalid_policy,
    connection_lost,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail);

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace hmt

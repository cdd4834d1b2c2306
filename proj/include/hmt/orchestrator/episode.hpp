#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hmt/agent/policy.hpp"
#include "hmt/orchestrator/command_brain.hpp"
#include "hmt/server/game_server.hpp"
#include "hmt/world/config.hpp"

namespace hmt::orchestrator {

enum class AiKind { dt, cmd, none };

std::string_view to_string(AiKind kind);
AiKind ai_kind_from_string(std::string_view s);  // throws invalid_config

struct EpisodeOptions {
    world::MissionConfig config;
    AiKind ai = AiKind::dt;
    std::optional<std::uint64_t> seed;  // overrides config.seed
    std::optional<agent::DecisionTreePolicy> policy;  // defaults to the reference policy
    std::optional<std::filesystem::path> missions_dir;
    std::string mission_id;  // derived from config name, ai and seed when empty
    // Instructions the scripted human sends to a command agent at the start.
    std::vector<std::string> commands;
    CommandAgentOptions command_options;
};

struct EpisodeResult {
    server::MissionArtifacts artifacts;
    std::string mission_id;
    std::size_t decisions = 0;        // dt agent decisions made
    std::size_t traces_received = 0;  // traces that reached the server
    std::int64_t ticks = 0;
    std::optional<command::ConversationRecord> conversation;  // command agent only
};

// Runs one headless mission in a single deterministic loop: the real server
// core with in-process clients speaking the wire codec.
EpisodeResult run_episode(const EpisodeOptions& options);

// The mission context document handed to the explanation service.
std::string mission_context_doc(const world::MissionConfig& config, AiKind ai,
                                const std::optional<agent::DecisionTreePolicy>& policy);

}  // namespace hmt::orchestrator

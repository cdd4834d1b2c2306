#pragma once

#include <cstdint>
#include <random>

#include "hmt/agent/observation.hpp"
#include "hmt/orchestrator/episode.hpp"

namespace hmt::fixtures {

// Runs (once per process) a headless episode on the default config without
// writing files.
const orchestrator::EpisodeResult& cached_episode(orchestrator::AiKind ai, std::uint64_t seed);

// A random but physically plausible observation for the AI, with plan
// completion drawn inside the band of `phase` (1..5). Covers depleted towers,
// full inventories, chest stock, pickaxes and every human activity.
agent::Observation random_observation(std::mt19937_64& rng, const world::MissionConfig& config, int phase);

}  // namespace hmt::fixtures

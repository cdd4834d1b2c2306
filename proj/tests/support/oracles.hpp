#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hmt/nav/pathfinding.hpp"
#include "hmt/protocol/messages.hpp"

namespace hmt::oracle {

// Plain breadth-first search; returns the number of steps (edges) from start
// to goal, or nullopt when unreachable. Blocked endpoints are unreachable.
std::optional<int> bfs_distance(const nav::NavGrid& grid, Voxel start, Voxel goal);

// Random w x h grid with each cell blocked independently with probability p.
nav::NavGrid random_grid(std::mt19937_64& rng, int w, int h, double p);

// Random but well-formed messages for round-trip fuzzing.
protocol::Envelope random_envelope(std::mt19937_64& rng);
world::ActionRequest random_action(std::mt19937_64& rng);

}  // namespace hmt::oracle

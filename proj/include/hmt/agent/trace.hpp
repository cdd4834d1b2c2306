#pragma once

#include <string>
#include <vector>

#include "hmt/world/types.hpp"

namespace hmt::agent {

struct BranchStep {
    std::string node;
    bool result = false;

    bool operator==(const BranchStep&) const = default;
};

// Record of one decision: which phase tree ran, the root-to-leaf path
// taken, and what was sent.
struct DecisionTrace {
    double sim_time = 0.0;
    int phase = 1;
    std::vector<BranchStep> active_branch;
    std::string selected_node;
    world::ActionRequest emitted_action = world::Idle{};

    bool operator==(const DecisionTrace&) const = default;
};

}  // namespace hmt::agent

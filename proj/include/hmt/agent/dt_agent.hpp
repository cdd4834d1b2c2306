#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "hmt/agent/observation.hpp"
#include "hmt/agent/policy.hpp"
#include "hmt/agent/trace.hpp"

namespace hmt::agent {

struct Decision {
    world::ActionRequest action;
    DecisionTrace trace;
};

// Walks the current phase's tree from the root. Pure: same inputs, same
// output. Never yields a place action.
Decision decide(const DecisionTreePolicy& policy, const Observation& obs);

// True when the trace's branch is a root-to-leaf path of its phase tree.
bool is_valid_branch(const DecisionTreePolicy& policy, const DecisionTrace& trace);

// Decision cadence around decide(): skips broadcasts while the agent is
// walking or mining, waits for the server to acknowledge an instant action,
// and backs off after idling or a rejection.
class DtAgentRuntime {
public:
    static constexpr double kRecheckSeconds = 0.5;

    DtAgentRuntime(DecisionTreePolicy policy, std::string self_id);

    void on_joined(const protocol::Joined& joined);
    // Returns the decision to send, if one was made for this broadcast.
    std::optional<Decision> on_state_update(const protocol::StateUpdate& update);
    void on_error(const protocol::ErrorNotice& error, double sim_time);

    const std::string& id() const { return self_id_; }
    std::size_t decisions() const { return decisions_; }
    bool ready() const { return info_.has_value(); }

private:
    DecisionTreePolicy policy_;
    std::string self_id_;
    std::optional<protocol::WorldInfo> info_;
    std::size_t decisions_ = 0;
    double hold_until_ = -1.0;
    bool awaiting_ack_ = false;
    double ack_deadline_ = 0.0;
};

}  // namespace hmt::agent

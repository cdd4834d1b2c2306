#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hmt/agent/dt_agent.hpp"
#include "hmt/protocol/messages.hpp"

namespace hmt::orchestrator {

// Client-side logic that reacts to server messages with client messages.
// Used by in-process episodes and by the networked agent executables alike.
class Brain {
public:
    virtual ~Brain() = default;
    virtual protocol::Join join_request() const = 0;
    virtual std::vector<protocol::ClientMessage> on_message(const protocol::ServerMessage& msg, double sim_time) = 0;
};

// Joins and never acts. Stands in for "no AI" so the mission gate can open.
class IdleBrain : public Brain {
public:
    IdleBrain(std::string id, world::AgentKind kind) : id_(std::move(id)), kind_(kind) {}
    protocol::Join join_request() const override { return {id_, kind_, std::nullopt}; }
    std::vector<protocol::ClientMessage> on_message(const protocol::ServerMessage&, double) override { return {}; }

private:
    std::string id_;
    world::AgentKind kind_;
};

class DtBrain : public Brain {
public:
    DtBrain(agent::DecisionTreePolicy policy, std::string id);
    protocol::Join join_request() const override;
    std::vector<protocol::ClientMessage> on_message(const protocol::ServerMessage& msg, double sim_time) override;
    const agent::DtAgentRuntime& runtime() const { return runtime_; }

private:
    agent::DtAgentRuntime runtime_;
};

// Deterministic stand-in for a human player: crafts a pickaxe once, then for
// each layer in order gathers its material (withdrawing from the chest when
// it holds any) and places the layer's cells in row-major order.
class ScriptedHuman : public Brain {
public:
    static constexpr int kMineBatch = 10;

    explicit ScriptedHuman(std::string id = "human");
    protocol::Join join_request() const override;
    std::vector<protocol::ClientMessage> on_message(const protocol::ServerMessage& msg, double sim_time) override;

    // Chat lines sent once, on the first state update after the gate opens.
    void set_commands(std::vector<std::string> commands) { commands_ = std::move(commands); }

    // The action for one observation, or nullopt while busy. Exposed for tests.
    std::optional<world::ActionRequest> decide(const protocol::StateUpdate& update);

private:
    enum class Mode { gather, build };

    std::string id_;
    std::optional<protocol::WorldInfo> info_;
    std::vector<std::string> commands_;
    bool commands_sent_ = false;
    Mode mode_ = Mode::gather;
    bool awaiting_ack_ = false;
    double ack_deadline_ = 0.0;
    double hold_until_ = -1.0;
};

}  // namespace hmt::orchestrator

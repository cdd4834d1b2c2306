#pragma once

#include <deque>
#include <future>
#include <memory>
#include <optional>
#include <string>

#include "hmt/command/command_agent.hpp"
#include "hmt/llm/client.hpp"
#include "hmt/orchestrator/brains.hpp"

namespace hmt::orchestrator {

struct CommandAgentOptions {
    command::AgentContext context;
    // Null means the deterministic rule parser handles every message.
    std::shared_ptr<llm::LanguageModelClient> model;
    // Interpret chat on a worker thread so a slow model never delays state
    // updates. Results are applied at the next state update. Headless
    // episodes keep this off for determinism.
    bool background_interpretation = false;
};

// Follows chat instructions from other agents. Each message is interpreted
// into skill calls, which run one after another; the reply goes back as chat.
class CommandBrain : public Brain {
public:
    CommandBrain(std::string id, CommandAgentOptions options);

    protocol::Join join_request() const override;
    std::vector<protocol::ClientMessage> on_message(const protocol::ServerMessage& msg, double sim_time) override;

    const command::ConversationRecord& conversation() const { return conversation_; }
    const std::deque<command::SkillCall>& pending() const { return queue_; }

private:
    struct PendingChat {
        double sim_time;
        std::string from;
        std::string text;
        std::future<command::Interpretation> result;
    };

    std::vector<protocol::ClientMessage> accept(double sim_time, const std::string& from, const std::string& text,
                                                command::Interpretation in);
    std::vector<protocol::ClientMessage> collect_finished();
    std::optional<protocol::ClientMessage> step(const protocol::StateUpdate& update);
    std::string summarize(const protocol::StateUpdate& update) const;

    std::string id_;
    CommandAgentOptions options_;
    std::optional<protocol::WorldInfo> info_;
    std::optional<protocol::StateUpdate> last_update_;
    std::deque<command::SkillCall> queue_;
    std::deque<PendingChat> in_flight_;
    command::ConversationRecord conversation_;
    int mine_baseline_ = -1;
    // The skill behind the most recent action, for reporting rejections.
    std::string last_skill_;
    bool last_skill_finished_ = false;  // inventory count when the current mine skill started
    bool awaiting_ack_ = false;
    double ack_deadline_ = 0.0;
    double hold_until_ = -1.0;
};

}  // namespace hmt::orchestrator

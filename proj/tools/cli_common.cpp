#include "cli.hpp"

#include <cstdlib>
#include <iostream>

#include "hmt/command/command_agent.hpp"
#include "hmt/common/error.hpp"
#include "hmt/llm/client.hpp"
#include "hmt/net/agent_client.hpp"
#include "hmt/orchestrator/command_brain.hpp"

namespace hmt::cli {

void add_dt_agent_options(CLI::App& app, DtAgentArgs& a) {
    app.add_option("--server", a.server, "Game server WebSocket URL")->capture_default_str();
    app.add_option("--policy", a.policy, "Decision-tree policy file (default: built-in reference policy)");
    app.add_option("--id", a.id, "Agent id to join as")->capture_default_str();
}

void add_cmd_agent_options(CLI::App& app, CmdAgentArgs& a) {
    app.add_option("--server", a.server, "Game server WebSocket URL")->capture_default_str();
    app.add_option("--context", a.context, "Context file with goals and constraints (\"forbid: <skill>\" lines)");
    auto* llm = app.add_option("--llm", a.llm, "Chat-completions endpoint; the key comes from LLM_API_KEY");
    auto* mock = app.add_option("--mock-llm", a.mock_llm, "Scripted mock model (JSON script file)");
    auto* rules = app.add_flag("--rules-only", a.rules_only, "Interpret commands with the rule grammar only");
    rules->excludes(llm)->excludes(mock);
    llm->excludes(mock);
    app.add_option("--id", a.id, "Agent id to join as")->capture_default_str();
}

int run_dt_agent(const DtAgentArgs& a) {
    const agent::DecisionTreePolicy policy = a.policy.empty() ? agent::reference_policy() : agent::load_policy(a.policy);
    orchestrator::DtBrain brain(policy, a.id);
    const auto r = net::run_agent(brain, a.server);
    std::cout << "mission " << (r.outcome.empty() ? "aborted" : r.outcome) << " after "
              << brain.runtime().decisions() << " decisions\n";
    return r.outcome.empty() ? 1 : 0;
}

int run_cmd_agent(const CmdAgentArgs& a) {
    orchestrator::CommandAgentOptions opts;
    if (!a.context.empty()) opts.context = command::load_context_file(a.context);
    if (!a.mock_llm.empty()) {
        opts.model = llm::MockLanguageModel::from_file(a.mock_llm);
    } else if (!a.llm.empty()) {
        const char* key = std::getenv("LLM_API_KEY");
        const char* model = std::getenv("LLM_MODEL");
        opts.model = std::make_shared<llm::HttpLanguageModel>(a.llm, key ? key : "", model && *model ? model : "default");
    } else if (!a.rules_only) {
        opts.model = llm::HttpLanguageModel::from_environment();
    }
    opts.background_interpretation = true;
    orchestrator::CommandBrain brain(a.id, opts);
    const auto r = net::run_agent(brain, a.server);
    std::cout << brain.conversation().to_json().dump(2) << "\n";
    return r.outcome.empty() ? 1 : 0;
}

int main_wrapper(CLI::App& app, int argc, char** argv, const std::function<int()>& body) {
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    try {
        return body();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hmt::cli

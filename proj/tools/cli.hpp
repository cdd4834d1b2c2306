#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace hmt::cli {

// Options shared by `hmt agent dt` and the standalone dt-agent binary.
struct DtAgentArgs {
    std::string server = "ws://127.0.0.1:8400/play";
    std::string policy;
    std::string id = "ai";
};

struct CmdAgentArgs {
    std::string server = "ws://127.0.0.1:8400/play";
    std::string context;
    std::string llm;
    std::string mock_llm;
    bool rules_only = false;
    std::string id = "ai";
};

void add_dt_agent_options(CLI::App& app, DtAgentArgs& args);
void add_cmd_agent_options(CLI::App& app, CmdAgentArgs& args);
int run_dt_agent(const DtAgentArgs& args);
int run_cmd_agent(const CmdAgentArgs& args);

// Parses, runs `body` and maps failures to exit codes: 2 for bad flags,
// 1 for runtime errors, 0 on success.
int main_wrapper(CLI::App& app, int argc, char** argv, const std::function<int()>& body);

}  // namespace hmt::cli

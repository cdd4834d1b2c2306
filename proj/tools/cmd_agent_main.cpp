#include "cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Command-following AI agent: turns chat instructions into skill calls."};
    hmt::cli::CmdAgentArgs args;
    hmt::cli::add_cmd_agent_options(app, args);
    return hmt::cli::main_wrapper(app, argc, argv, [&] { return hmt::cli::run_cmd_agent(args); });
}

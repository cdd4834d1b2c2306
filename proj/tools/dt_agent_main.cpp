#include "cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Decision-tree AI agent: joins a game server and plays with a five-phase policy."};
    hmt::cli::DtAgentArgs args;
    hmt::cli::add_dt_agent_options(app, args);
    return hmt::cli::main_wrapper(app, argc, argv, [&] { return hmt::cli::run_dt_agent(args); });
}

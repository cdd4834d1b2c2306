#include <cmath>
#include <csignal>
#include <filesystem>
#include <iostream>

#include "cli.hpp"
#include "hmt/aae/aae.hpp"
#include "hmt/command/command_agent.hpp"
#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/net/aae_http.hpp"
#include "hmt/net/play_server.hpp"
#include "hmt/orchestrator/episode.hpp"
#include "hmt/world/config.hpp"

namespace fs = std::filesystem;
using namespace hmt;

namespace {

// Default chat script for `episode --ai cmd`.
const std::vector<std::string> kDefaultCommands = {
    "get 3 wood",
    "craft a pickaxe",
    "get 15 stone and put it in the chest",
    "get 15 brick and put it in the chest",
};

world::MissionConfig config_from(const std::string& path) {
    if (path.empty() || path == "default") return world::default_config();
    if (path == "relaxed") return world::relaxed_config();
    if (path == "long") return world::long_config();
    return world::load_config(path);
}

std::shared_ptr<llm::LanguageModelClient> mock_from(const std::string& script) {
    if (script.empty() || script == "default")
        return std::make_shared<llm::MockLanguageModel>(llm::MockLanguageModel::default_script());
    return llm::MockLanguageModel::from_file(script);
}

net::PlayServer* g_play = nullptr;
net::AaeHttpServer* g_aae = nullptr;

void on_signal(int) {
    if (g_play) g_play->stop();
    if (g_aae) g_aae->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-machine teaming testbed: game server, headless episodes, agents and the after-action "
                 "explanation service."};
    app.require_subcommand(1);

    // serve
    struct {
        std::string config, missions_dir = "missions", mission_id, host = "0.0.0.0", ui_dir;
        std::optional<std::uint64_t> seed;
        int port = 8400;
    } serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the real-time game server with a WebSocket endpoint at /play");
    serve_cmd->add_option("--config", serve.config, "Mission config TOML file, or default|relaxed|long");
    serve_cmd->add_option("--seed", serve.seed, "Override the config seed");
    serve_cmd->add_option("--missions-dir", serve.missions_dir, "Where mission files are written")->capture_default_str();
    serve_cmd->add_option("--mission-id", serve.mission_id, "Mission id (default: <config name>-live-seed<N>)");
    serve_cmd->add_option("--host", serve.host, "Listen address")->capture_default_str();
    serve_cmd->add_option("--port", serve.port, "Listen port")->capture_default_str()->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--ui-dir", serve.ui_dir, "Serve static files (the browser client) from this directory")
        ->check(CLI::ExistingDirectory);

    // episode
    struct {
        std::string config, ai = "dt", policy, missions_dir = "missions", mission_id, context, mock_llm;
        std::optional<std::uint64_t> seed;
        std::vector<std::string> commands;
        bool no_files = false;
    } ep;
    auto* ep_cmd = app.add_subcommand("episode", "Run one headless episode with a scripted human");
    ep_cmd->add_option("--config", ep.config, "Mission config TOML file, or default|relaxed|long");
    ep_cmd->add_option("--seed", ep.seed, "Override the config seed");
    ep_cmd->add_option("--ai", ep.ai, "AI teammate")->check(CLI::IsMember({"dt", "cmd", "none"}))->capture_default_str();
    ep_cmd->add_option("--policy", ep.policy, "Decision-tree policy file for --ai dt")->check(CLI::ExistingFile);
    ep_cmd->add_option("--missions-dir", ep.missions_dir, "Where mission files are written")->capture_default_str();
    ep_cmd->add_option("--mission-id", ep.mission_id, "Mission id (default: <config name>-<ai>-seed<N>)");
    ep_cmd->add_option("--command", ep.commands, "Chat line the scripted human sends to a cmd agent (repeatable)");
    ep_cmd->add_option("--context", ep.context, "Context file for the cmd agent")->check(CLI::ExistingFile);
    ep_cmd->add_option("--mock-llm", ep.mock_llm, "Mock model script for the cmd agent (default: rule parser only)");
    ep_cmd->add_flag("--no-files", ep.no_files, "Do not write mission files");

    // aae
    struct {
        std::string missions_dir = "missions", host = "0.0.0.0", mock_llm, persist_dir;
        int port = 8500;
        std::size_t token_budget = aae::PromptOptions{}.token_budget;
        bool mock = false;
    } aa;
    auto* aae_cmd = app.add_subcommand("aae", "Serve missions, frames, markers and the explanation chat over HTTP");
    aae_cmd->add_option("--missions-dir", aa.missions_dir, "Directory holding recorded missions")->capture_default_str();
    aae_cmd->add_option("--host", aa.host, "Listen address")->capture_default_str();
    aae_cmd->add_option("--port", aa.port, "Listen port")->capture_default_str()->check(CLI::Range(0, 65535));
    aae_cmd->add_option("--mock-llm", aa.mock_llm,
                        "Answer with a scripted mock model; pass a script file or 'default' for the built-in one");
    aae_cmd->add_option("--persist-dir", aa.persist_dir, "Persist chat sessions as JSON files here");
    aae_cmd->add_option("--token-budget", aa.token_budget, "Approximate prompt budget before truncation")
        ->capture_default_str();

    // agent dt / agent cmd
    auto* agent_cmd = app.add_subcommand("agent", "Run an AI agent against a game server");
    agent_cmd->require_subcommand(1);
    cli::DtAgentArgs dt;
    cli::CmdAgentArgs cmd;
    auto* dt_cmd = agent_cmd->add_subcommand("dt", "Decision-tree agent");
    cli::add_dt_agent_options(*dt_cmd, dt);
    auto* cmd_cmd = agent_cmd->add_subcommand("cmd", "Command-following agent");
    cli::add_cmd_agent_options(*cmd_cmd, cmd);

    // export
    struct {
        std::string input, out;
        bool bare_array = false;
    } ex;
    auto* ex_cmd = app.add_subcommand("export", "Re-serialize a mission timeline");
    ex_cmd->add_option("input", ex.input, "Mission directory or timeline.json")->required()->check(CLI::ExistingPath);
    ex_cmd->add_option("-o,--out", ex.out, "Output file (default: stdout)");
    ex_cmd->add_flag("--bare-array", ex.bare_array, "Write only the array of {timestamp, action} events");

    // config
    std::string config_preset = "default";
    auto* cfg_cmd = app.add_subcommand("config", "Print a mission config as TOML after validating it");
    cfg_cmd->add_option("preset", config_preset, "default|relaxed|long or a TOML file")->capture_default_str();

    // validate
    std::string validate_input;
    auto* val_cmd = app.add_subcommand("validate", "Check a timeline file against the schema");
    val_cmd->add_option("input", validate_input, "Timeline file")->required()->check(CLI::ExistingFile);

    return cli::main_wrapper(app, argc, argv, [&]() -> int {
        if (*serve_cmd) {
            world::MissionConfig cfg = config_from(serve.config);
            if (serve.seed) cfg.seed = *serve.seed;
            world::validate(cfg);
            server::ServerOptions so;
            so.mission_id = serve.mission_id.empty() ? cfg.name + "-live-seed" + std::to_string(cfg.seed) : serve.mission_id;
            so.missions_dir = fs::path(serve.missions_dir);
            so.context_doc = orchestrator::mission_context_doc(cfg, orchestrator::AiKind::dt, agent::reference_policy());
            server::GameServer game(cfg, so);
            net::PlayServerOptions po;
            po.host = serve.host;
            po.port = static_cast<unsigned short>(serve.port);
            if (!serve.ui_dir.empty()) po.ui_dir = fs::path(serve.ui_dir);
            net::PlayServer play(game, po);
            const auto port = play.bind();
            std::cout << "game server on ws://" << serve.host << ":" << port << "/play, mission " << so.mission_id
                      << std::endl;
            g_play = &play;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            play.run();
            g_play = nullptr;
            if (!game.finished()) {
                std::cout << "stopped before the mission ended\n";
                return 0;
            }
            std::cout << "mission " << world::to_string(game.artifacts().outcome.status) << ", files in "
                      << (game.artifacts().directory ? game.artifacts().directory->string() : "-") << "\n";
            return 0;
        }
        if (*ep_cmd) {
            orchestrator::EpisodeOptions o;
            o.config = config_from(ep.config);
            o.ai = orchestrator::ai_kind_from_string(ep.ai);
            o.seed = ep.seed;
            if (!ep.policy.empty()) o.policy = agent::load_policy(ep.policy);
            if (!ep.no_files) o.missions_dir = fs::path(ep.missions_dir);
            o.mission_id = ep.mission_id;
            if (o.ai == orchestrator::AiKind::cmd) {
                o.commands = ep.commands.empty() ? kDefaultCommands : ep.commands;
                if (!ep.context.empty()) o.command_options.context = command::load_context_file(ep.context);
                if (!ep.mock_llm.empty()) o.command_options.model = mock_from(ep.mock_llm);
            }
            const auto r = orchestrator::run_episode(o);
            const auto& out = r.artifacts.outcome;
            std::cout << "mission " << r.mission_id << ": " << world::to_string(out.status) << " at t="
                      << format_seconds(out.ended_at.value_or(0)) << " s, completion "
                      << format_seconds(std::round(out.final_completion * 1000) / 10) << "%, " << r.artifacts.timeline.events.size()
                      << " events";
            if (o.ai == orchestrator::AiKind::dt) std::cout << ", " << r.decisions << " decisions";
            std::cout << "\n";
            if (r.artifacts.directory) std::cout << "files in " << r.artifacts.directory->string() << "\n";
            return 0;
        }
        if (*aae_cmd) {
            std::shared_ptr<llm::LanguageModelClient> model;
            if (aae_cmd->count("--mock-llm")) model = mock_from(aa.mock_llm);
            else model = llm::HttpLanguageModel::from_environment();
            if (!model) std::cerr << "warning: no LLM_ENDPOINT and no --mock-llm; queries will fail with llm_unavailable\n";
            aae::PromptOptions po;
            po.token_budget = aa.token_budget;
            aae::AaeService service(std::make_shared<aae::MissionStore>(aa.missions_dir), model,
                                    aa.persist_dir.empty() ? std::nullopt : std::optional(fs::path(aa.persist_dir)), po);
            net::AaeHttpServer http(service);
            const int port = http.bind(aa.host, aa.port);
            std::cout << "explanation service on http://" << aa.host << ":" << port << std::endl;
            g_aae = &http;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            http.listen();
            g_aae = nullptr;
            return 0;
        }
        if (*dt_cmd) return cli::run_dt_agent(dt);
        if (*cmd_cmd) return cli::run_cmd_agent(cmd);
        if (*ex_cmd) {
            fs::path in = ex.input;
            if (fs::is_directory(in)) in /= "timeline.json";
            const auto tl = log::load_timeline(in);
            const std::string text = log::serialize_timeline(tl, ex.bare_array);
            if (ex.out.empty()) std::cout << text;
            else write_file(ex.out, text);
            return 0;
        }
        if (*cfg_cmd) {
            const auto cfg = config_from(config_preset);
            world::validate(cfg);
            std::cout << world::to_toml(cfg);
            return 0;
        }
        if (*val_cmd) {
            const auto tl = log::load_timeline(validate_input);
            std::cout << "valid: " << tl.events.size() << " events, mission " << tl.header.mission_id << "\n";
            return 0;
        }
        return 2;
    });
}

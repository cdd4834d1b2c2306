#include "hmt/orchestrator/episode.hpp"

#include <memory>
#include <sstream>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/orchestrator/brains.hpp"
#include "hmt/orchestrator/command_brain.hpp"
#include "hmt/protocol/codec.hpp"

namespace hmt::orchestrator {

using namespace hmt::protocol;

std::string_view to_string(AiKind kind) {
    switch (kind) {
        case AiKind::dt: return "dt";
        case AiKind::cmd: return "cmd";
        case AiKind::none: return "none";
    }
    return "?";
}

AiKind ai_kind_from_string(std::string_view s) {
    if (s == "dt") return AiKind::dt;
    if (s == "cmd") return AiKind::cmd;
    if (s == "none") return AiKind::none;
    throw Error(Errc::invalid_config, "ai must be dt, cmd or none, got '" + std::string(s) + "'");
}

namespace {

// In-process client: every message crosses the wire codec in both directions.
struct LoopbackClient {
    Brain* brain = nullptr;
    server::GameServer* server = nullptr;
    server::ConnId conn = 0;
    std::int64_t seq = 0;
    double sim_time = 0.0;
    bool open = true;

    void attach() {
        conn = server->connect({[this](const std::string& body) { deliver(body); }, [this] { open = false; }});
        send(brain->join_request());
    }

    void send(const ClientMessage& msg) {
        server->receive(conn, encode_body(Envelope{++seq, sim_time, msg}));
    }

    void deliver(const std::string& body) {
        const Envelope env = decode_body(body);
        sim_time = env.sim_time;
        for (const auto& reply : brain->on_message(std::get<ServerMessage>(env.payload), env.sim_time)) send(reply);
    }
};

}  // namespace

EpisodeResult run_episode(const EpisodeOptions& o) {
    world::MissionConfig cfg = o.config;
    if (o.seed) cfg.seed = *o.seed;
    world::validate(cfg);
    const agent::DecisionTreePolicy policy = o.policy ? *o.policy : agent::reference_policy();

    EpisodeResult result;
    result.mission_id = !o.mission_id.empty()
                            ? o.mission_id
                            : cfg.name + "-" + std::string(to_string(o.ai)) + "-seed" + std::to_string(cfg.seed);

    server::ServerOptions so;
    so.mission_id = result.mission_id;
    so.missions_dir = o.missions_dir;
    so.context_doc = mission_context_doc(cfg, o.ai, o.ai == AiKind::dt ? std::optional(policy) : std::nullopt);
    server::GameServer server(cfg, so);

    ScriptedHuman human("human");
    human.set_commands(o.commands);
    std::unique_ptr<Brain> ai;
    DtBrain* dt = nullptr;
    CommandBrain* cmd = nullptr;
    switch (o.ai) {
        case AiKind::dt: {
            auto b = std::make_unique<DtBrain>(policy, "ai");
            dt = b.get();
            ai = std::move(b);
            break;
        }
        case AiKind::cmd: {
            auto b = std::make_unique<CommandBrain>("ai", o.command_options);
            cmd = b.get();
            ai = std::move(b);
            break;
        }
        case AiKind::none: ai = std::make_unique<IdleBrain>("ai", world::AgentKind::ai); break;
    }

    LoopbackClient human_client{&human, &server};
    LoopbackClient ai_client{ai.get(), &server};
    human_client.attach();
    ai_client.attach();

    const std::int64_t cap = cfg.time_limit_ticks() + 16;
    std::int64_t iterations = 0;
    while (!server.finished() && iterations++ < cap) server.tick();
    if (!server.finished()) throw Error(Errc::io_failure, "episode did not reach a mission outcome");

    result.artifacts = server.artifacts();
    result.decisions = dt ? dt->runtime().decisions() : 0;
    result.traces_received = server.traces_received();
    result.ticks = server.world().tick;
    if (cmd) {
        result.conversation = cmd->conversation();
        if (result.artifacts.directory)
            write_file(*result.artifacts.directory / "conversation.json", result.conversation->to_json().dump(2) + "\n");
    }
    return result;
}

std::string mission_context_doc(const world::MissionConfig& c, AiKind ai,
                                const std::optional<agent::DecisionTreePolicy>& policy) {
    std::ostringstream out;
    out << "# Mission context: " << c.name << "\n\n";
    out << "## Goal\n\n";
    out << "Build a house on a " << c.width << "x" << c.height << " flat world by placing blocks on every marked "
        << "floor-plan cell before " << format_seconds(c.time_limit_s) << " seconds of simulated time elapse. "
        << "The house has " << c.plan.layers.size() << " layers, built in order:\n\n";
    for (size_t i = 0; i < c.plan.layers.size(); ++i)
        out << (i + 1) << ". " << c.plan.layers[i].cells.size() << " cells of " << c.plan.layers[i].material << "\n";
    out << "\nThe mission succeeds when completion reaches 100% in time and fails otherwise.\n\n";

    out << "## World\n\n";
    for (const auto& t : c.towers)
        out << "- " << t.material << " tower at " << to_string(t.at) << " holding " << t.count << " blocks\n";
    out << "- crafting table at " << to_string(c.crafting_table) << "; a pickaxe costs " << c.pickaxe_cost << " "
        << c.pickaxe_material << " and makes mining " << format_seconds(c.pickaxe_speedup) << "x faster\n";
    out << "- storage chest at " << to_string(c.chest) << " shared by every agent\n";
    out << "- mining times without a pickaxe:";
    const char* sep = " ";
    for (const auto& [m, d] : c.mining_duration_s) {
        out << sep << m << " " << format_seconds(d) << " s";
        sep = ", ";
    }
    out << "\n\n";

    out << "## Roster\n\n";
    out << "- `human` (human): the only agent allowed to place blocks.\n";
    switch (ai) {
        case AiKind::dt:
            out << "- `ai` (ai): decision-tree agent. It gathers, crafts and stores materials but cannot place "
                   "blocks.\n";
            break;
        case AiKind::cmd:
            out << "- `ai` (ai): command-following agent driven by chat instructions from the human.\n";
            break;
        case AiKind::none: out << "- `ai` (ai): present but idle for the whole mission.\n"; break;
    }

    if (policy) {
        const auto& t = policy->thresholds.values();
        out << "\n## AI decision process\n\n";
        out << "The AI runs a five-phase decision tree (policy `" << policy->name << "`). The phase is 1 plus the "
            << "number of completion thresholds reached; thresholds are " << format_seconds(t[0]) << ", "
            << format_seconds(t[1]) << ", " << format_seconds(t[2]) << " and " << format_seconds(t[3])
            << ". The mission starts in phase 1.\n\n";
        if (!policy->description.empty()) out << policy->description << "\n\n";
        out << "Each decision is logged with its phase, the branch of predicates taken and the selected leaf. "
               "The AI infers what the human is doing from the human's position and action: gathering a "
               "material near its tower, crafting at the table, building next to the plan, at the chest, "
               "traveling or idle.\n";
    }

    out << "\n## Timeline\n\n";
    out << "Events are recorded whenever something changes. Each event has a `timestamp` in seconds and an "
           "`action` holding per-agent changes, world changes (blocks, chest, completion, phase), decision traces "
           "and chat.\n";
    return out.str();
}

}  // namespace hmt::orchestrator

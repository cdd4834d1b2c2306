#include "hmt/server/game_server.hpp"

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/log/capture.hpp"
#include "hmt/protocol/codec.hpp"
#include "hmt/world/serialize.hpp"

namespace hmt::server {

using namespace hmt::protocol;

GameServer::GameServer(world::MissionConfig config, ServerOptions options)
    : config_(std::move(config)), options_(std::move(options)), world_(world::init_world(config_)) {}

ConnId GameServer::connect(Outbound outbound) {
    std::lock_guard lock(inbox_mutex_);
    const ConnId id = next_conn_++;
    pending_connects_.emplace(id, std::move(outbound));
    return id;
}

void GameServer::receive(ConnId conn, std::string body) {
    std::lock_guard lock(inbox_mutex_);
    inbox_.push_back({conn, std::move(body)});
}

void GameServer::disconnect(ConnId conn) {
    std::lock_guard lock(inbox_mutex_);
    inbox_.push_back({conn, std::nullopt});
}

void GameServer::send(ConnId conn, const ServerMessage& msg) {
    auto it = conns_.find(conn);
    if (it == conns_.end() || !it->second.open) return;
    Envelope e{++it->second.seq, world_.clock, msg};
    it->second.out.send(encode_body(e));
}

void GameServer::broadcast(const ServerMessage& msg) {
    for (auto& [id, c] : conns_)
        if (c.open) send(id, msg);
}

void GameServer::send_error(ConnId conn, Errc code, const std::string& detail) {
    send(conn, ErrorNotice{std::string(to_string(code)), detail});
}

void GameServer::close_conn(ConnId conn) {
    auto it = conns_.find(conn);
    if (it == conns_.end() || !it->second.open) return;
    it->second.open = false;
    if (it->second.out.close) it->second.out.close();
}

void GameServer::tick() {
    if (finished_) return;

    std::deque<Inbound> inbox;
    {
        std::lock_guard lock(inbox_mutex_);
        for (auto& [id, out] : pending_connects_) conns_[id].out = std::move(out);
        pending_connects_.clear();
        inbox.swap(inbox_);
    }
    for (auto& msg : inbox) {
        if (!msg.body) handle_close(msg.conn);
        else handle(msg.conn, *msg.body);
    }

    if (!world_.started) {
        std::vector<world::AgentKind> kinds;
        for (const auto& a : world_.agents) kinds.push_back(a.kind);
        if (!mission_start_gate(kinds)) return;
        // Gate opened: the clock and the log both start here; the world is
        // not stepped this tick so every client sees the t=0 state first.
        world_.started = true;
        log_.open(options_.mission_id, world_);
        queued_.clear();
        broadcast(make_state_update(world_));
        return;
    }

    auto result = world::step(world_, queued_, config_.tick_seconds());
    queued_.clear();
    world_ = std::move(result.world);
    for (const auto& r : result.rejections)
        for (auto& [id, c] : conns_)
            if (c.agent_id == r.agent_id) send_error(id, r.code, r.detail);

    const std::size_t before = log_.timeline().events.size();
    log_.record(world_);
    capture_if_logged(before);

    if (world_.tick % config_.broadcast_every_ticks == 0 || world_.outcome.status != world::MissionOutcome::Status::ongoing)
        broadcast(make_state_update(world_));
    if (world_.outcome.status != world::MissionOutcome::Status::ongoing) finish();
}

void GameServer::capture_if_logged(std::size_t events_before) {
    const auto& events = log_.timeline().events;
    if (events.size() > events_before)
        artifacts_.capture.push_back({events.back().timestamp, world::serialize_state(world_)});
}

void GameServer::finish() {
    broadcast(MissionEnd{world_.outcome});
    for (auto& [id, c] : conns_) close_conn(id);
    const std::size_t before = log_.timeline().events.size();
    artifacts_.timeline = log_.close(world_.outcome);
    if (artifacts_.timeline.events.size() > before)
        artifacts_.capture.push_back({artifacts_.timeline.events.back().timestamp, world::serialize_state(world_)});
    artifacts_.outcome = world_.outcome;
    finished_ = true;
    if (options_.missions_dir) {
        artifacts_.directory = *options_.missions_dir / options_.mission_id;
        write_mission_files(*artifacts_.directory, artifacts_, options_.context_doc);
    }
}

void GameServer::handle(ConnId conn, const std::string& body) {
    auto it = conns_.find(conn);
    if (it == conns_.end() || !it->second.open) return;
    Connection& c = it->second;

    Envelope env;
    try {
        env = decode_body(body);
    } catch (const Error& e) {
        // A bad frame is reported; the connection survives.
        send_error(conn, e.code(), e.detail());
        return;
    }
    const auto* msg = std::get_if<ClientMessage>(&env.payload);
    if (!msg) {
        send_error(conn, Errc::protocol_violation, "clients may only send client messages");
        return;
    }

    if (c.agent_id.empty()) {
        if (const auto* join = std::get_if<Join>(msg)) return handle_join(conn, c, *join);
        if (std::holds_alternative<Disconnect>(*msg)) return close_conn(conn);
        send_error(conn, Errc::protocol_violation, "first message must be join");
        close_conn(conn);
        return;
    }

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Join>) {
                send_error(conn, Errc::protocol_violation, "already joined as '" + c.agent_id + "'");
            } else if constexpr (std::is_same_v<T, ActionMsg>) {
                if (!world_.started) {
                    send_error(conn, Errc::mission_not_started, "waiting for a human and an AI agent to join");
                    return;
                }
                queued_.push_back({++action_seq_, c.agent_id, m.action});
            } else if constexpr (std::is_same_v<T, ChatSend>) {
                broadcast(ChatRelay{c.agent_id, m.text});
                if (log_.is_open()) log_.submit_chat({c.agent_id, m.text, world_.clock});
            } else if constexpr (std::is_same_v<T, TraceMsg>) {
                ++traces_received_;
                if (log_.is_open()) log_.submit_trace(c.agent_id, m.trace);
            } else if constexpr (std::is_same_v<T, Disconnect>) {
                handle_close(conn);
            }
        },
        *msg);
}

void GameServer::handle_join(ConnId conn, Connection& c, const Join& join) {
    if (world_.find_agent(join.name)) {
        // The existing session keeps the id.
        send_error(conn, Errc::join_rejected, "agent id '" + join.name + "' is already in use");
        close_conn(conn);
        return;
    }
    const bool can_place = join.can_place.value_or(join.kind == world::AgentKind::human);
    const int index = joined_per_kind_[join.kind]++;
    try {
        world::join_agent(world_, join.name, join.kind, can_place,
                          world::spawn_position(config_, join.kind, index, config_.seed));
    } catch (const Error& e) {
        send_error(conn, e.code(), e.detail());
        close_conn(conn);
        return;
    }
    c.agent_id = join.name;
    send(conn, Joined{join.name, join.kind, make_world_info(config_)});
}

void GameServer::handle_close(ConnId conn) {
    auto it = conns_.find(conn);
    if (it == conns_.end()) return;
    const std::string id = it->second.agent_id;
    close_conn(conn);
    if (id.empty()) return;
    // The agent stays in the world, stopped; the mission carries on.
    if (world_.started) queued_.push_back({++action_seq_, id, world::Idle{}});
    for (auto& [other, c] : conns_)
        if (other != conn && c.open) send_error(other, Errc::agent_left, id);
}

void write_mission_files(const std::filesystem::path& dir, const MissionArtifacts& artifacts,
                         const std::string& context_doc) {
    log::write_timeline(dir / "timeline.json", artifacts.timeline);
    log::write_capture(dir / "capture.bin", artifacts.capture);
    write_file(dir / "context.md", context_doc);
    std::filesystem::create_directories(dir / "frames");
}

}  // namespace hmt::server

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hmt/log/capture.hpp"
#include "hmt/log/mission_log.hpp"
#include "hmt/protocol/messages.hpp"
#include "hmt/world/world.hpp"

namespace hmt::server {

using ConnId = std::uint64_t;

// How the server reaches a client. Both callbacks run on the tick thread.
struct Outbound {
    std::function<void(const std::string& body)> send;
    std::function<void()> close;
};

struct ServerOptions {
    std::string mission_id = "mission";
    // Files go to <missions_dir>/<mission_id>/ when set.
    std::optional<std::filesystem::path> missions_dir;
    std::string context_doc;
};

// Everything an episode or a test may want to inspect afterwards.
struct MissionArtifacts {
    world::MissionOutcome outcome;
    log::MissionTimeline timeline;
    std::vector<log::CapturedSnapshot> capture;
    std::optional<std::filesystem::path> directory;
};

// The authoritative tick loop, independent of any transport. connect(),
// receive() and disconnect() may be called from any thread; they only queue
// work. tick() drains the queue, advances the world and broadcasts.
class GameServer {
public:
    GameServer(world::MissionConfig config, ServerOptions options);

    ConnId connect(Outbound outbound);
    void receive(ConnId conn, std::string body);
    void disconnect(ConnId conn);

    void tick();

    bool started() const { return world_.started; }
    bool finished() const { return finished_; }
    const world::WorldState& world() const { return world_; }
    const log::MissionLog& mission_log() const { return log_; }
    const MissionArtifacts& artifacts() const { return artifacts_; }
    std::size_t traces_received() const { return traces_received_; }

private:
    struct Connection {
        Outbound out;
        std::string agent_id;  // empty until joined
        std::int64_t seq = 0;
        bool open = true;
    };
    struct Inbound {
        ConnId conn = 0;
        std::optional<std::string> body;  // nullopt: transport closed
    };

    void handle(ConnId conn, const std::string& body);
    void handle_join(ConnId conn, Connection& c, const protocol::Join& join);
    void handle_close(ConnId conn);
    void send(ConnId conn, const protocol::ServerMessage& msg);
    void broadcast(const protocol::ServerMessage& msg);
    void send_error(ConnId conn, Errc code, const std::string& detail);
    void close_conn(ConnId conn);
    void capture_if_logged(std::size_t events_before);
    void finish();

    world::MissionConfig config_;
    ServerOptions options_;
    world::WorldState world_;
    log::MissionLog log_;
    MissionArtifacts artifacts_;

    std::mutex inbox_mutex_;
    std::deque<Inbound> inbox_;
    std::map<ConnId, Outbound> pending_connects_;
    ConnId next_conn_ = 1;

    std::map<ConnId, Connection> conns_;
    std::vector<world::QueuedAction> queued_;
    std::uint64_t action_seq_ = 0;
    std::map<world::AgentKind, int> joined_per_kind_;
    std::size_t traces_received_ = 0;
    bool finished_ = false;
};

// Writes timeline.json, capture.bin and context.md into `dir`.
void write_mission_files(const std::filesystem::path& dir, const MissionArtifacts& artifacts,
                         const std::string& context_doc);

}  // namespace hmt::server

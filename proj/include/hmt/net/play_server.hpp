#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hmt/server/game_server.hpp"

namespace hmt::net {

struct PlayServerOptions {
    std::string host = "0.0.0.0";
    unsigned short port = 8400;  // 0 picks a free port
    // Static files served for plain HTTP GETs, e.g. the browser client.
    std::optional<std::filesystem::path> ui_dir;
    // Keep serving this long after the mission ends so final messages flush.
    double linger_s = 1.0;
};

// WebSocket transport for the game server: clients connect to /play and
// exchange one protocol message body per text frame. The tick loop runs in
// real time on its own thread.
class PlayServer {
public:
    PlayServer(server::GameServer& game, PlayServerOptions options);
    ~PlayServer();

    // Binds the listening socket; throws Error(io_failure) when the port is taken.
    unsigned short bind();
    // Serves until the mission finishes (plus linger) or stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hmt::net

#pragma once

#include <string>

#include "hmt/orchestrator/brains.hpp"

namespace hmt::net {

struct ServerUrl {
    std::string host;
    std::string port;
    std::string path;
};

// Accepts ws://host[:port][/path]; the default port is 8400 and the default
// path /play. Throws Error(invalid_endpoint).
ServerUrl parse_server_url(const std::string& url);

struct ClientResult {
    std::string outcome;  // mission_end outcome, empty if the connection dropped first
    std::string error;    // last error code received, if any
};

// Connects a brain to a game server and pumps messages until the mission
// ends or the server closes the connection. Throws Error(connection_lost)
// when the server cannot be reached.
ClientResult run_agent(orchestrator::Brain& brain, const std::string& url);

}  // namespace hmt::net

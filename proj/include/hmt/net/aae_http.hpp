#pragma once

#include <memory>
#include <string>

#include "hmt/aae/aae.hpp"

namespace hmt::net {

// HTTP front end of the explanation service:
//   GET  /missions
//   GET  /missions/{id}/timeline | /context | /markers?kinds=a,b | /frame?t=&view=
//   POST /sessions                {"mission_id"}
//   POST /sessions/{id}/query     {"text", "playhead_s"}
// Errors come back as {"error": code, "detail": text} with a 4xx/5xx status.
class AaeHttpServer {
public:
    explicit AaeHttpServer(aae::AaeService& service);
    ~AaeHttpServer();

    // Returns the bound port (useful with port 0). Throws Error(io_failure)
    // when the port is in use.
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

int http_status_for(Errc code);

}  // namespace hmt::net

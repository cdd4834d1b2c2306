#include "hmt/net/agent_client.hpp"

#include <regex>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "hmt/common/error.hpp"
#include "hmt/protocol/codec.hpp"

namespace hmt::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

ServerUrl parse_server_url(const std::string& url) {
    static const std::regex re(R"(^ws://([^:/]+)(?::([0-9]{1,5}))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error(Errc::invalid_endpoint, "expected ws://host[:port][/path], got '" + url + "'");
    if (m[2].matched && (std::stoi(m[2]) < 1 || std::stoi(m[2]) > 65535))
        throw Error(Errc::invalid_endpoint, "port out of range in '" + url + "'");
    return {m[1], m[2].matched ? m[2].str() : "8400", m[3].matched ? m[3].str() : "/play"};
}

ClientResult run_agent(orchestrator::Brain& brain, const std::string& url) {
    const ServerUrl u = parse_server_url(url);
    asio::io_context ioc;
    websocket::stream<tcp::socket> ws(ioc);
    try {
        tcp::resolver resolver(ioc);
        asio::connect(ws.next_layer(), resolver.resolve(u.host, u.port));
        ws.handshake(u.host + ":" + u.port, u.path);
    } catch (const std::exception& e) {
        throw Error(Errc::connection_lost, "cannot reach " + url + ": " + e.what());
    }
    ws.text(true);

    std::int64_t seq = 0;
    double sim_time = 0.0;
    auto send = [&](const protocol::ClientMessage& m) {
        ws.write(asio::buffer(protocol::encode_body(protocol::Envelope{++seq, sim_time, m})));
    };

    ClientResult result;
    send(brain.join_request());
    beast::flat_buffer buffer;
    for (;;) {
        beast::error_code ec;
        ws.read(buffer, ec);
        if (ec) break;
        const protocol::Envelope env = protocol::decode_body(beast::buffers_to_string(buffer.data()));
        buffer.consume(buffer.size());
        sim_time = env.sim_time;
        const auto* msg = std::get_if<protocol::ServerMessage>(&env.payload);
        if (!msg) continue;
        if (const auto* e = std::get_if<protocol::ErrorNotice>(msg)) result.error = e->code;
        try {
            for (const auto& reply : brain.on_message(*msg, env.sim_time)) send(reply);
        } catch (const beast::system_error&) {
            break;
        }
        if (const auto* end = std::get_if<protocol::MissionEnd>(msg)) {
            result.outcome = std::string(world::to_string(end->outcome.status));
            break;
        }
    }
    beast::error_code ignored;
    ws.close(websocket::close_code::normal, ignored);
    return result;
}

}  // namespace hmt::net

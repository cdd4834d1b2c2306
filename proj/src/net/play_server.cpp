#include "hmt/net/play_server.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"

namespace hmt::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".png") return "image/png";
    if (ext == ".svg") return "image/svg+xml";
    return "application/octet-stream";
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, server::GameServer& game) : ws_(std::move(socket)), game_(game) {}

    void start(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->on_accept();
        });
    }

private:
    void on_accept() {
        auto weak = weak_from_this();
        auto exec = ws_.get_executor();
        conn_ = game_.connect({[weak, exec](const std::string& body) {
                                   asio::post(exec, [weak, body] {
                                       if (auto s = weak.lock()) s->enqueue(body);
                                   });
                               },
                               [weak, exec] {
                                   asio::post(exec, [weak] {
                                       if (auto s = weak.lock()) s->close_after_flush();
                                   });
                               }});
        connected_ = true;
        read();
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->gone();
                return;
            }
            self->game_.receive(self->conn_, beast::buffers_to_string(self->buffer_.data()));
            self->buffer_.consume(self->buffer_.size());
            self->read();
        });
    }

    void gone() {
        if (connected_) game_.disconnect(conn_);
        connected_ = false;
    }

    void enqueue(std::string body) {
        if (closing_) return;
        out_.push_back(std::move(body));
        if (out_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->out_.clear();
                return;
            }
            self->out_.pop_front();
            if (!self->out_.empty()) self->write();
            else if (self->closing_) self->do_close();
        });
    }

    void close_after_flush() {
        if (closing_) return;
        closing_ = true;
        if (out_.empty()) do_close();
    }

    void do_close() {
        ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
    }

    websocket::stream<beast::tcp_stream> ws_;
    server::GameServer& game_;
    server::ConnId conn_ = 0;
    bool connected_ = false;
    bool closing_ = false;
    beast::flat_buffer buffer_;
    std::deque<std::string> out_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, server::GameServer& game, std::optional<std::filesystem::path> ui_dir)
        : stream_(std::move(socket)), game_(game), ui_dir_(std::move(ui_dir)) {}

    void start() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (!ec) self->on_request();
        });
    }

private:
    void on_request() {
        if (websocket::is_upgrade(req_)) {
            if (req_.target() != "/play") return respond(http::status::not_found, "text/plain", "unknown endpoint\n");
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), game_)->start(std::move(req_));
            return;
        }
        if (req_.method() != http::verb::get || !ui_dir_)
            return respond(http::status::not_found, "text/plain", "not found\n");
        std::string target(req_.target());
        target = target.substr(0, target.find('?'));
        if (target.find("..") != std::string::npos) return respond(http::status::bad_request, "text/plain", "bad path\n");
        std::filesystem::path path = *ui_dir_ / target.substr(1);
        if (target == "/" || std::filesystem::is_directory(path)) path /= "index.html";
        if (!std::filesystem::is_regular_file(path)) return respond(http::status::not_found, "text/plain", "not found\n");
        respond(http::status::ok, mime_type(path), read_file(path));
    }

    void respond(http::status status, std::string_view type, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
        res->set(http::field::content_type, beast::string_view(type.data(), type.size()));
        res->body() = std::move(body);
        res->prepare_payload();
        res->keep_alive(false);
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ec;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        });
    }

    beast::tcp_stream stream_;
    server::GameServer& game_;
    std::optional<std::filesystem::path> ui_dir_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

}  // namespace

struct PlayServer::Impl {
    server::GameServer& game;
    PlayServerOptions options;
    asio::io_context ioc{1};
    tcp::acceptor acceptor{ioc};
    std::atomic<bool> stopping{false};

    Impl(server::GameServer& g, PlayServerOptions o) : game(g), options(std::move(o)) {}

    void accept() {
        acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            std::make_shared<HttpSession>(std::move(socket), game, options.ui_dir)->start();
            accept();
        });
    }
};

PlayServer::PlayServer(server::GameServer& game, PlayServerOptions options)
    : impl_(std::make_unique<Impl>(game, std::move(options))) {}

PlayServer::~PlayServer() = default;

unsigned short PlayServer::bind() {
    auto& a = impl_->acceptor;
    beast::error_code ec;
    const tcp::endpoint ep(asio::ip::make_address(impl_->options.host, ec), impl_->options.port);
    if (ec) throw Error(Errc::io_failure, "bad host '" + impl_->options.host + "'");
    a.open(ep.protocol(), ec);
    if (!ec) a.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) a.bind(ep, ec);
    if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error(Errc::io_failure, "cannot listen on port " + std::to_string(impl_->options.port) + ": " + ec.message());
    return a.local_endpoint().port();
}

void PlayServer::run() {
    if (!impl_->acceptor.is_open()) bind();
    impl_->accept();
    std::thread io([this] { impl_->ioc.run(); });

    // Real-time tick loop; the game core itself is transport-agnostic.
    auto& game = impl_->game;
    const auto period = std::chrono::duration<double>(1.0 / game.world().config->tick_rate_hz);
    auto next = std::chrono::steady_clock::now();
    std::optional<std::chrono::steady_clock::time_point> finished_at;
    while (!impl_->stopping) {
        game.tick();
        if (game.finished() && !finished_at) finished_at = std::chrono::steady_clock::now();
        if (finished_at && std::chrono::steady_clock::now() - *finished_at >
                               std::chrono::duration<double>(impl_->options.linger_s))
            break;
        next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
        std::this_thread::sleep_until(next);
    }
    asio::post(impl_->ioc, [this] {
        beast::error_code ec;
        impl_->acceptor.close(ec);
        impl_->ioc.stop();
    });
    io.join();
}

void PlayServer::stop() { impl_->stopping = true; }

}  // namespace hmt::net

#include "hmt/net/aae_http.hpp"

#include <sstream>

#include <httplib.h>

#include "hmt/common/error.hpp"
#include "hmt/replay/replay.hpp"

namespace hmt::net {

using nlohmann::json;

int http_status_for(Errc code) {
    switch (code) {
        case Errc::mission_not_found:
        case Errc::session_not_found: return 404;
        case Errc::context_missing: return 409;
        case Errc::llm_unavailable: return 503;
        case Errc::io_failure: return 500;
        default: return 400;
    }
}

struct AaeHttpServer::Impl {
    aae::AaeService& service;
    httplib::Server http;

    explicit Impl(aae::AaeService& s) : service(s) { routes(); }

    static void send_json(httplib::Response& res, const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    // Runs a handler, mapping errors to JSON bodies.
    template <typename F>
    static void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            send_json(res, {{"error", to_string(e.code())}, {"detail", e.detail()}}, http_status_for(e.code()));
        } catch (const json::exception& e) {
            send_json(res, {{"error", "schema_invalid"}, {"detail", e.what()}}, 400);
        } catch (const std::exception& e) {
            send_json(res, {{"error", "io_failure"}, {"detail", e.what()}}, 500);
        }
    }

    static json parse_body(const httplib::Request& req) {
        json j = json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw Error(Errc::schema_invalid, "request body must be a JSON object");
        return j;
    }

    void routes() {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Headers", "Content-Type"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        http.Get("/missions", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                json out = json::array();
                for (const auto& id : service.missions().list()) {
                    json entry = {{"id", id}};
                    try {
                        const auto m = service.missions().load(id);
                        entry["events"] = m.timeline->events.size();
                        entry["end_time"] = replay::end_time(*m.timeline);
                        if (m.timeline->footer) {
                            entry["outcome"] = world::to_string(m.timeline->footer->status);
                            entry["final_completion"] = m.timeline->footer->final_completion;
                        }
                    } catch (const Error& e) {
                        entry["error"] = to_string(e.code());
                    }
                    out.push_back(std::move(entry));
                }
                send_json(res, out);
            });
        });

        http.Get(R"(/missions/([^/]+)/timeline)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto m = service.missions().load(req.matches[1]);
                res.set_content(log::serialize_timeline(*m.timeline), "application/json");
            });
        });

        http.Get(R"(/missions/([^/]+)/context)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { res.set_content(service.missions().context(req.matches[1]), "text/markdown"); });
        });

        http.Get(R"(/missions/([^/]+)/markers)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto m = service.missions().load(req.matches[1]);
                std::set<replay::MarkerKind> kinds = replay::all_marker_kinds();
                if (req.has_param("kinds") && !req.get_param_value("kinds").empty()) {
                    kinds.clear();
                    std::stringstream ss(req.get_param_value("kinds"));
                    std::string k;
                    while (std::getline(ss, k, ','))
                        if (!k.empty()) kinds.insert(replay::marker_kind_from_string(k));
                }
                json out = json::array();
                for (const auto& mk : replay::extract_markers(*m.timeline, kinds))
                    out.push_back({{"timestamp", mk.timestamp}, {"label", mk.label}, {"kind", replay::to_string(mk.kind)}});
                send_json(res, out);
            });
        });

        http.Get(R"(/missions/([^/]+)/frame)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                if (!req.has_param("t")) throw Error(Errc::t_out_of_range, "missing t");
                double t = 0;
                try {
                    size_t used = 0;
                    const std::string raw = req.get_param_value("t");
                    t = std::stod(raw, &used);
                    if (used != raw.size()) throw std::invalid_argument(raw);
                } catch (const std::exception&) {
                    throw Error(Errc::t_out_of_range, "t must be a number of seconds");
                }
                const std::string view = req.has_param("view") ? req.get_param_value("view") : "topdown";
                res.set_content(aae::frame_png(service.missions(), req.matches[1], t, view), "image/png");
            });
        });

        http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                if (!body.contains("mission_id") || !body["mission_id"].is_string())
                    throw Error(Errc::schema_invalid, "mission_id must be a string");
                send_json(res, aae::to_json(service.create_session(body["mission_id"].get<std::string>())), 201);
            });
        });

        http.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, aae::to_json(service.session(req.matches[1]))); });
        });

        http.Post(R"(/sessions/([^/]+)/query)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                if (!body.contains("text") || !body["text"].is_string())
                    throw Error(Errc::schema_invalid, "text must be a string");
                if (!body.contains("playhead_s") || !body["playhead_s"].is_number())
                    throw Error(Errc::schema_invalid, "playhead_s must be a number");
                const std::string id = req.matches[1];
                const double playhead = body["playhead_s"].get<double>();
                const std::string answer = service.query(id, body["text"].get<std::string>(), playhead);
                send_json(res, {{"answer", answer}, {"playhead_s", playhead},
                                {"history_length", service.session(id).history.size()}});
            });
        });
    }
};

AaeHttpServer::AaeHttpServer(aae::AaeService& service) : impl_(std::make_unique<Impl>(service)) {}

AaeHttpServer::~AaeHttpServer() = default;

int AaeHttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(Errc::io_failure, "port " + std::to_string(port) + " is in use");
    return bound;
}

void AaeHttpServer::listen() { impl_->http.listen_after_bind(); }

void AaeHttpServer::stop() { impl_->http.stop(); }

}  // namespace hmt::net

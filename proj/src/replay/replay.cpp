#include "hmt/replay/replay.hpp"

#include <algorithm>
#include <cmath>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "hmt/world/serialize.hpp"

namespace hmt::replay {

std::string_view to_string(Heading h) {
    switch (h) {
        case Heading::north: return "north";
        case Heading::east: return "east";
        case Heading::south: return "south";
        case Heading::west: return "west";
    }
    return "?";
}

double end_time(const log::MissionTimeline& tl) {
    if (tl.footer && tl.footer->ended_at) return *tl.footer->ended_at;
    return tl.events.empty() ? tl.header.start_time : tl.events.back().timestamp;
}

namespace {

Heading heading_of(double dx, double dy, Heading fallback) {
    if (std::abs(dx) < 1e-12 && std::abs(dy) < 1e-12) return fallback;
    if (std::abs(dx) > std::abs(dy)) return dx > 0 ? Heading::east : Heading::west;
    return dy > 0 ? Heading::south : Heading::north;
}

}  // namespace

Replayer::Replayer(const log::MissionTimeline& timeline) : timeline_(timeline) {
    auto add = [&](const std::string& id, double t, Position p) {
        auto& k = keyframes_[id];
        const Heading h = k.empty() ? Heading::north
                                    : heading_of(p.x - k.back().position.x, p.y - k.back().position.y, k.back().heading);
        k.push_back({t, p, h});
    };
    for (const auto& a : timeline.header.roster) add(a.id, timeline.header.start_time, a.position);
    for (const auto& e : timeline.events) {
        const auto it = e.action.find("agents");
        if (it == e.action.end()) continue;
        for (const auto& [id, d] : it->items()) {
            if (d.contains("joined")) add(id, e.timestamp, world::position_from_json(d["joined"]["position"]));
            else if (d.contains("position")) add(id, e.timestamp, world::position_from_json(d["position"]));
        }
    }
    reset();
}

void Replayer::reset() {
    snap_ = Snapshot{};
    snap_.world = log::initial_world(timeline_.header);
    snap_.t = timeline_.header.start_time;
    applied_ = 0;
    refresh_display();
}

const Snapshot& Replayer::seek(double t) {
    const double end = end_time(timeline_);
    if (!(t >= 0.0) || t > end + 1e-9)
        throw Error(Errc::t_out_of_range, "t=" + format_seconds(t) + " outside [0, " + format_seconds(end) + "]");
    if (t < snap_.t) reset();
    while (applied_ < timeline_.events.size() && timeline_.events[applied_].timestamp <= t)
        log::apply_event(snap_.world, timeline_.events[applied_++]);
    snap_.t = t;
    refresh_display();
    return snap_;
}

void Replayer::refresh_display() {
    snap_.display.clear();
    const double t = snap_.t;
    for (const auto& a : snap_.world.agents) {
        DisplayPose pose{a.position, Heading::north};
        const auto kf = keyframes_.find(a.id);
        if (kf != keyframes_.end() && !kf->second.empty()) {
            const auto& k = kf->second;
            // Last keyframe at or before t.
            auto after = std::upper_bound(k.begin(), k.end(), t, [](double v, const Keyframe& f) { return v < f.t; });
            if (after != k.begin()) {
                const auto before = std::prev(after);
                Heading h = before->heading;
                if (after != k.end() && after->t > before->t && t > before->t) {
                    const double u = (t - before->t) / (after->t - before->t);
                    pose.position = {before->position.x + u * (after->position.x - before->position.x),
                                     before->position.y + u * (after->position.y - before->position.y)};
                    h = heading_of(after->position.x - before->position.x, after->position.y - before->position.y, h);
                } else {
                    pose.position = a.position;
                }
                pose.heading = h;
            }
        }
        snap_.display[a.id] = pose;
    }
}

Snapshot reconstruct(const log::MissionTimeline& timeline, double t) {
    Replayer r(timeline);
    return r.seek(t);
}

std::string_view to_string(MarkerKind k) {
    switch (k) {
        case MarkerKind::phase_change: return "phase_change";
        case MarkerKind::decision_point: return "decision_point";
        case MarkerKind::chat: return "chat";
        case MarkerKind::block_placed: return "block_placed";
        case MarkerKind::custom: return "custom";
    }
    return "?";
}

MarkerKind marker_kind_from_string(std::string_view s) {
    for (auto k : all_marker_kinds())
        if (to_string(k) == s) return k;
    throw Error(Errc::schema_invalid, "unknown marker kind '" + std::string(s) + "'");
}

std::set<MarkerKind> all_marker_kinds() {
    return {MarkerKind::phase_change, MarkerKind::decision_point, MarkerKind::chat, MarkerKind::block_placed,
            MarkerKind::custom};
}

std::vector<Marker> extract_markers(const log::MissionTimeline& timeline, const std::set<MarkerKind>& kinds) {
    std::vector<Marker> out;
    std::map<std::string, std::string> last_node;  // per agent
    for (const auto& e : timeline.events) {
        const log::json& a = e.action;
        std::map<MarkerKind, std::string> hits;

        if (a.contains("world") && a["world"].contains("phase"))
            hits[MarkerKind::phase_change] = "phase " + std::to_string(a["world"]["phase"].get<int>());

        if (a.contains("decision_trace")) {
            std::string label;
            for (const auto& tr : a["decision_trace"]) {
                const std::string agent = tr.value("agent_id", "");
                const std::string node = tr.value("selected_node", "");
                auto [it, fresh] = last_node.try_emplace(agent, node);
                if (fresh || it->second != node) {
                    if (label.empty()) label = agent + ": " + node;
                    it->second = node;
                }
            }
            if (!label.empty()) hits[MarkerKind::decision_point] = label;
        }

        if (a.contains("chat") && !a["chat"].empty()) {
            const auto& c = a["chat"][0];
            hits[MarkerKind::chat] = c.value("from", "") + ": " + c.value("text", "");
        }

        if (a.contains("world") && a["world"].contains("blocks")) {
            for (const auto& b : a["world"]["blocks"])
                if (b.contains("placed_by") && b["placed_by"].is_string()) {
                    hits[MarkerKind::block_placed] = b["placed_by"].get<std::string>() + " placed " +
                                                     b["block"].value("material", "") + " at (" +
                                                     std::to_string(b["x"].get<int>()) + "," +
                                                     std::to_string(b["y"].get<int>()) + ")";
                    break;
                }
        }

        if (a.contains("annotation")) hits[MarkerKind::custom] = a["annotation"].get<std::string>();

        for (const auto& [kind, label] : hits)
            if (kinds.count(kind)) {
                out.push_back({e.timestamp, label, kind});
                break;
            }
    }
    return out;
}

}  // namespace hmt::replay

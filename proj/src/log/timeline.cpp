#include "hmt/log/timeline.hpp"

#include <cmath>
#include <set>

#include "hmt/common/error.hpp"
#include "hmt/common/json_util.hpp"
#include "hmt/common/text.hpp"
#include "hmt/protocol/codec.hpp"
#include "hmt/world/serialize.hpp"

namespace hmt::log {

using namespace hmt::jsonu;

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
    throw Error(Errc::schema_invalid, where + ": " + what);
}

// Re-raises schema errors from the strict accessors with a location prefix.
template <class F>
void at(const std::string& where, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        invalid(where, e.detail());
    }
}

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok |= k == a;
        if (!ok) invalid(where, "unexpected key '" + k + "'");
    }
}

void check_voxel(const json& j, const std::string& where) {
    if (!j.is_object()) invalid(where, "expected {x, y}");
    only_keys(j, {"x", "y"}, where);
    at(where, [&] { world::voxel_from_json(j); });
}

void check_agent_delta(const json& d, const std::string& where) {
    if (!d.is_object()) invalid(where, "agent delta must be an object");
    if (d.empty()) invalid(where, "agent delta must not be empty");
    only_keys(d, {"joined", "position", "inventory", "behavior_state", "held_item", "looking_at", "action"}, where);
    at(where, [&] {
        if (const json* j = optional_field(d, "joined")) world::agent_from_observable(*j);
        if (const json* p = optional_field(d, "position")) {
            expect_object(*p, "position");
            const auto pos = world::position_from_json(*p);
            if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) invalid(where, "position must be finite");
        }
        if (const json* i = optional_field(d, "inventory")) world::inventory_from_json(*i);
        if (optional_field(d, "behavior_state")) world::activity_from_string(get_string(d, "behavior_state"));
        if (const json* h = optional_field(d, "held_item"); h && !h->is_null() && !h->is_string())
            invalid(where, "'held_item' must be a string or null");
        if (const json* l = optional_field(d, "looking_at"); l && !l->is_null()) check_voxel(*l, where + ".looking_at");
        if (optional_field(d, "action")) world::action_kind_from_string(get_string(d, "action"));
    });
}

void check_world_delta(const json& w, const std::string& where) {
    if (!w.is_object()) invalid(where, "world delta must be an object");
    only_keys(w, {"blocks", "chest", "completion", "phase"}, where);
    at(where, [&] {
        if (const json* blocks = optional_field(w, "blocks")) {
            expect_array(*blocks, "blocks");
            for (const auto& b : *blocks) {
                expect_object(b, "block change");
                expect_keys(b, {"x", "y", "block", "placed_by"}, "block change");
                world::voxel_from_json(b);
                world::block_from_json(field(b, "block"));
                const json& by = field(b, "placed_by");
                if (!by.is_null() && !by.is_string()) invalid(where, "'placed_by' must be a string or null");
            }
        }
        if (const json* c = optional_field(w, "chest")) world::counts_from_json(*c);
        if (optional_field(w, "completion")) {
            const double c = get_number(w, "completion");
            if (c < 0.0 || c > 1.0) invalid(where, "completion outside [0, 1]");
        }
        if (optional_field(w, "phase")) {
            const auto p = get_int(w, "phase");
            if (p < 1 || p > 5) invalid(where, "phase outside 1..5");
        }
    });
}

std::string format_line(std::size_t line) { return "line " + std::to_string(line); }

// Line (1-based) where element `index` of the events array starts, found by
// a small scanner so that schema errors can point into the file.
std::optional<std::size_t> event_line(std::string_view text, std::size_t index, bool bare) {
    std::size_t line = 1;
    int depth = 0;
    bool in_string = false;
    bool escape = false;
    int events_depth = bare ? 1 : -1;
    bool expect_events = false;
    std::size_t count = 0;
    bool at_element_start = false;
    std::string key;
    bool collecting_key = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') ++line;
        if (in_string) {
            if (escape) escape = false;
            else if (c == '\\') escape = true;
            else if (c == '"') {
                in_string = false;
                if (collecting_key && depth == 1 && key == "events") expect_events = true;
                collecting_key = false;
            } else if (collecting_key) key.push_back(c);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c)) || c == ':') continue;
        if (at_element_start && depth == events_depth) {
            if (count == index) return line;
            ++count;
            at_element_start = false;
        }
        switch (c) {
            case '"':
                in_string = true;
                collecting_key = depth == 1 && !bare;
                key.clear();
                break;
            case '{':
            case '[':
                ++depth;
                if (c == '[' && expect_events && depth == 2) {
                    events_depth = 2;
                    at_element_start = true;
                }
                if (c == '[' && bare && depth == 1) at_element_start = true;
                expect_events = false;
                break;
            case '}':
            case ']':
                if (depth == events_depth && c == ']') events_depth = -2;
                --depth;
                break;
            case ',':
                if (depth == events_depth) at_element_start = true;
                expect_events = false;
                break;
            default: break;
        }
    }
    return std::nullopt;
}

world::MissionConfig header_config(const json& h) {
    world::MissionConfig c;
    at("header.config", [&] { c = world::config_from_json(field(h, "config")); });
    try {
        world::validate(c);
    } catch (const Error& e) {
        invalid("header.config", e.detail());
    }
    return c;
}

}  // namespace

json to_json(const TimelineEvent& e) { return {{"timestamp", e.timestamp}, {"action", e.action}}; }

json to_json(const MissionTimeline& t) {
    json roster = json::array();
    for (const auto& a : t.header.roster) roster.push_back(world::observable_agent(a));
    json events = json::array();
    for (const auto& e : t.events) events.push_back(to_json(e));
    json j{{"header",
            {{"mission_id", t.header.mission_id},
             {"config", world::to_json(t.header.config)},
             {"config_digest", t.header.config_digest},
             {"seed", t.header.seed},
             {"start_time", t.header.start_time},
             {"roster", roster}}},
           {"events", events}};
    if (t.footer) j["footer"] = world::to_json(*t.footer);
    return j;
}

std::string serialize_timeline(const MissionTimeline& t, bool bare_array) {
    // Events go one per line so diagnostics can point at them.
    auto event_text = [](const TimelineEvent& e) {
        return "{\"timestamp\":" + json(e.timestamp).dump() + ",\"action\":" + e.action.dump() + "}";
    };
    std::string out;
    if (bare_array) {
        out = "[";
        for (std::size_t i = 0; i < t.events.size(); ++i) out += (i ? ",\n  " : "\n  ") + event_text(t.events[i]);
        out += t.events.empty() ? "]\n" : "\n]\n";
        return out;
    }
    json full = to_json(t);
    std::string header = full["header"].dump(2);
    for (std::size_t pos = header.find('\n'); pos != std::string::npos; pos = header.find('\n', pos + 1))
        header.insert(pos + 1, "  ");
    out = "{\n  \"header\": " + header + ",\n  \"events\": [";
    for (std::size_t i = 0; i < t.events.size(); ++i) out += (i ? ",\n    " : "\n    ") + event_text(t.events[i]);
    out += t.events.empty() ? "]" : "\n  ]";
    if (t.footer) out += ",\n  \"footer\": " + world::to_json(*t.footer).dump();
    out += "\n}\n";
    return out;
}

void validate_event(const json& e, const std::string& where) {
    if (!e.is_object()) invalid(where, "event must be an object");
    if (e.size() != 2 || !e.contains("timestamp") || !e.contains("action")) {
        std::string keys;
        for (const auto& [k, v] : e.items()) keys += (keys.empty() ? "" : ", ") + k;
        invalid(where, "event must have exactly the keys 'timestamp' and 'action' (found: " + keys + ")");
    }
    const json& ts = e["timestamp"];
    if (!ts.is_number() || !std::isfinite(ts.get<double>()) || ts.get<double>() < 0.0)
        invalid(where + ".timestamp", "must be a non-negative finite number");
    const json& a = e["action"];
    if (!a.is_object()) invalid(where + ".action", "must be an object");
    only_keys(a, {"agents", "world", "decision_trace", "chat", "annotation"}, where + ".action");
    if (const json* agents = optional_field(a, "agents")) {
        if (!agents->is_object()) invalid(where + ".action.agents", "must be an object keyed by agent id");
        for (const auto& [id, d] : agents->items()) check_agent_delta(d, where + ".action.agents." + id);
    }
    if (const json* w = optional_field(a, "world")) check_world_delta(*w, where + ".action.world");
    if (const json* traces = optional_field(a, "decision_trace")) {
        const std::string w = where + ".action.decision_trace";
        if (!traces->is_array()) invalid(w, "must be an array");
        for (const auto& t : *traces)
            at(w, [&] {
                get_string(t, "agent_id");
                json copy = t;
                copy.erase("agent_id");
                protocol::trace_from_json(copy);
                expect_keys(t, {"agent_id", "sim_time", "phase", "active_branch", "selected_node", "emitted_action"},
                            "decision trace");
            });
    }
    if (const json* chat = optional_field(a, "chat")) {
        const std::string w = where + ".action.chat";
        if (!chat->is_array()) invalid(w, "must be an array");
        for (const auto& c : *chat)
            at(w, [&] {
                expect_keys(c, {"from", "text", "sim_time"}, "chat entry");
                get_string(c, "from");
                get_string(c, "text");
                get_number(c, "sim_time");
            });
    }
    if (const json* note = optional_field(a, "annotation"); note && !note->is_string())
        invalid(where + ".action.annotation", "must be a string");
}

MissionTimeline parse_timeline(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
        throw Error(Errc::schema_invalid, format_line(line) + ": not valid JSON (" + e.what() + ")");
    }
    if (root.is_array()) invalid("root", "bare event array has no header; replay needs the full timeline");
    if (!root.is_object()) invalid("root", "must be an object with header, events and footer");
    only_keys(root, {"header", "events", "footer"}, "root");
    if (!root.contains("header")) invalid("root", "missing 'header'");
    if (!root.contains("events")) invalid("root", "missing 'events'");

    MissionTimeline t;
    const json& h = root["header"];
    if (!h.is_object()) invalid("header", "must be an object");
    only_keys(h, {"mission_id", "config", "config_digest", "seed", "start_time", "roster"}, "header");
    at("header", [&] {
        t.header.mission_id = get_string(h, "mission_id");
        t.header.config_digest = get_string(h, "config_digest");
        const json& seed = field(h, "seed");
        if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
            invalid("header.seed", "must be a non-negative integer");
        t.header.seed = seed.get<std::uint64_t>();
        t.header.start_time = get_number(h, "start_time");
    });
    t.header.config = header_config(h);
    if (world::config_digest(t.header.config) != t.header.config_digest)
        invalid("header.config_digest", "does not match the embedded config");
    at("header.roster", [&] {
        const json& roster = field(h, "roster");
        expect_array(roster, "roster");
        std::set<std::string> ids;
        for (const auto& a : roster) {
            t.header.roster.push_back(world::agent_from_observable(a));
            if (!ids.insert(t.header.roster.back().id).second) invalid("header.roster", "duplicate agent id");
        }
    });

    const json& events = root["events"];
    if (!events.is_array()) invalid("events", "must be an array");
    double last = t.header.start_time;
    const double limit = t.header.config.time_limit_s + 1e-9;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string where = "events[" + std::to_string(i) + "]";
        try {
            validate_event(events[i], where);
            const double ts = events[i]["timestamp"].get<double>();
            if (ts < last) invalid(where + ".timestamp", "decreases (" + format_seconds(ts) + " after " + format_seconds(last) + ")");
            if (ts > limit) invalid(where + ".timestamp", "exceeds the time limit");
            last = ts;
            t.events.push_back({ts, events[i]["action"]});
        } catch (const Error& e) {
            const auto line = event_line(text, i, false);
            throw Error(Errc::schema_invalid, (line ? format_line(*line) + ": " : std::string()) + e.detail());
        }
    }
    if (const json* footer = optional_field(root, "footer"))
        at("footer", [&] { t.footer = world::outcome_from_json(*footer); });
    return t;
}

MissionTimeline load_timeline(const std::filesystem::path& path) { return parse_timeline(read_file(path)); }

void write_timeline(const std::filesystem::path& path, const MissionTimeline& timeline, bool bare_array) {
    write_file(path, serialize_timeline(timeline, bare_array));
}

world::WorldState initial_world(const TimelineHeader& header) {
    world::WorldState w = world::init_world(header.config);
    for (const auto& a : header.roster) {
        world::AgentState copy = a;
        copy.task = {};
        w.agents.push_back(std::move(copy));
    }
    w.started = true;
    w.tick = std::llround(header.start_time * header.config.tick_rate_hz);
    w.clock = header.start_time;
    return w;
}

void apply_event(world::WorldState& w, const TimelineEvent& e) {
    const json& a = e.action;
    if (const json* agents = optional_field(a, "agents")) {
        for (const auto& [id, d] : agents->items()) {
            if (const json* joined = optional_field(d, "joined")) {
                if (w.find_agent(id)) invalid("event", "agent '" + id + "' joined twice");
                w.agents.push_back(world::agent_from_observable(*joined));
                continue;
            }
            world::AgentState* agent = w.find_agent(id);
            if (!agent) invalid("event", "unknown agent '" + id + "'");
            if (const json* p = optional_field(d, "position")) agent->position = world::position_from_json(*p);
            if (const json* i = optional_field(d, "inventory")) agent->inventory = world::inventory_from_json(*i);
            if (optional_field(d, "behavior_state"))
                agent->behavior_state = world::activity_from_string(get_string(d, "behavior_state"));
            if (const json* h = optional_field(d, "held_item")) agent->held_item = h->is_null() ? "" : h->get<std::string>();
            if (const json* l = optional_field(d, "looking_at")) {
                if (l->is_null()) agent->looking_at.reset();
                else agent->looking_at = world::voxel_from_json(*l);
            }
            if (optional_field(d, "action")) agent->action = world::action_kind_from_string(get_string(d, "action"));
        }
    }
    if (const json* wd = optional_field(a, "world")) {
        if (const json* blocks = optional_field(*wd, "blocks")) {
            for (const auto& b : *blocks) {
                const Voxel v = world::voxel_from_json(b);
                if (!w.in_bounds(v)) invalid("event", "block change outside the world at " + to_string(v));
                w.at(v) = world::block_from_json(b["block"]);
                if (b["placed_by"].is_null()) w.placed_by.erase(v);
                else w.placed_by[v] = b["placed_by"].get<std::string>();
            }
        }
        if (const json* chest = optional_field(*wd, "chest")) w.chest = world::counts_from_json(*chest);
    }
    w.clock = e.timestamp;
    w.tick = std::llround(e.timestamp * w.config->tick_rate_hz);
}

}  // namespace hmt::log

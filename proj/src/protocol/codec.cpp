#include "hmt/protocol/codec.hpp"


#include "hmt/common/error.hpp"
#include "hmt/common/json_util.hpp"
#include "hmt/world/serialize.hpp"

namespace hmt::protocol {

using namespace hmt::jsonu;
using world::to_json;

namespace {

constexpr std::uint32_t kMaxFrame = 64u << 20;

json step_json(const agent::BranchStep& s) { return {{"node", s.node}, {"result", s.result}}; }

json towers_json(const std::vector<world::TowerSpec>& towers) {
    json out = json::array();
    for (const auto& t : towers) out.push_back({{"at", to_json(t.at)}, {"material", t.material}, {"count", t.count}});
    return out;
}

std::vector<world::TowerSpec> towers_from_json(const json& j) {
    expect_array(j, "towers");
    std::vector<world::TowerSpec> out;
    for (const auto& t : j)
        out.push_back({world::voxel_from_json(field(t, "at")), get_string(t, "material"),
                       static_cast<int>(get_int(t, "count"))});
    return out;
}

json summary_json(const WorldSummary& w) {
    json towers = json::array();
    for (const auto& t : w.towers)
        towers.push_back({{"at", to_json(t.at)}, {"material", t.material}, {"remaining", t.remaining}});
    json layers = json::array();
    for (const auto& l : w.layers) layers.push_back({{"material", l.material}, {"filled", l.filled}, {"total", l.total}});
    json placed = json::array();
    for (const auto& v : w.placed) placed.push_back(to_json(v));
    return {{"completion", w.completion}, {"clock", w.clock},   {"phase", w.phase},  {"chest", to_json(w.chest)},
            {"towers", towers},           {"layers", layers},   {"placed", placed}};
}

WorldSummary summary_from_json(const json& j) {
    expect_object(j, "world");
    WorldSummary w;
    w.completion = get_number(j, "completion");
    w.clock = get_number(j, "clock");
    w.phase = static_cast<int>(get_int(j, "phase"));
    w.chest = world::counts_from_json(field(j, "chest"));
    const json& towers = field(j, "towers");
    expect_array(towers, "towers");
    for (const auto& t : towers)
        w.towers.push_back({world::voxel_from_json(field(t, "at")), get_string(t, "material"),
                            static_cast<int>(get_int(t, "remaining"))});
    const json& layers = field(j, "layers");
    expect_array(layers, "layers");
    for (const auto& l : layers)
        w.layers.push_back({get_string(l, "material"), static_cast<int>(get_int(l, "filled")),
                            static_cast<int>(get_int(l, "total"))});
    const json& placed = field(j, "placed");
    expect_array(placed, "placed");
    for (const auto& v : placed) w.placed.push_back(world::voxel_from_json(v));
    return w;
}

json server_payload(const ServerMessage& m) {
    json p{{"type", message_type(m)}};
    if (auto* joined = std::get_if<Joined>(&m)) {
        p["agent_id"] = joined->agent_id;
        p["kind"] = world::to_string(joined->kind);
        if (joined->world_info) p["world_info"] = to_json(*joined->world_info);
    } else if (auto* su = std::get_if<StateUpdate>(&m)) {
        json s = to_json(*su);
        p["agents"] = std::move(s["agents"]);
        p["world"] = std::move(s["world"]);
    } else if (auto* chat = std::get_if<ChatRelay>(&m)) {
        p["from"] = chat->from;
        p["text"] = chat->text;
    } else if (auto* end = std::get_if<MissionEnd>(&m)) {
        p["outcome"] = to_json(end->outcome);
    } else if (auto* err = std::get_if<ErrorNotice>(&m)) {
        p["code"] = err->code;
        p["detail"] = err->detail;
    }
    return p;
}

ServerMessage server_from_payload(const json& p) {
    const std::string type = get_string(p, "type");
    if (type == "joined") {
        Joined j{get_string(p, "agent_id"), world::agent_kind_from_string(get_string(p, "kind")), std::nullopt};
        if (const json* info = optional_field(p, "world_info")) j.world_info = world_info_from_json(*info);
        return j;
    }
    if (type == "state_update") return state_update_from_json(p);
    if (type == "chat") return ChatRelay{get_string(p, "from"), get_string(p, "text")};
    if (type == "mission_end") return MissionEnd{world::outcome_from_json(field(p, "outcome"))};
    if (type == "error") return ErrorNotice{get_string(p, "code"), get_string(p, "detail")};
    throw Error(Errc::unknown_variant, "server message type '" + type + "'");
}

json client_payload(const ClientMessage& m) {
    json p{{"type", message_type(m)}};
    if (auto* join = std::get_if<Join>(&m)) {
        p["name"] = join->name;
        p["kind"] = world::to_string(join->kind);
        if (join->can_place) p["can_place"] = *join->can_place;
    } else if (auto* action = std::get_if<ActionMsg>(&m)) {
        p["action"] = to_json(action->action);
    } else if (auto* chat = std::get_if<ChatSend>(&m)) {
        p["text"] = chat->text;
    } else if (auto* trace = std::get_if<TraceMsg>(&m)) {
        p["trace"] = to_json(trace->trace);
    }
    return p;
}

ClientMessage client_from_payload(const json& p) {
    const std::string type = get_string(p, "type");
    if (type == "join") {
        Join j{get_string(p, "name"), world::agent_kind_from_string(get_string(p, "kind")), std::nullopt};
        if (optional_field(p, "can_place")) j.can_place = get_bool(p, "can_place");
        return j;
    }
    if (type == "action") return ActionMsg{world::action_from_json(field(p, "action"))};
    if (type == "chat") return ChatSend{get_string(p, "text")};
    if (type == "trace") return TraceMsg{trace_from_json(field(p, "trace"))};
    if (type == "disconnect") return Disconnect{};
    throw Error(Errc::unknown_variant, "client message type '" + type + "'");
}

// Enum parsers in the world module report unknown names as schema errors;
// for the wire these are malformed payloads.
template <class F>
auto wire_guard(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == Errc::unknown_variant || e.code() == Errc::schema_version_mismatch) throw;
        throw Error(Errc::malformed_frame, e.detail());
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_frame, e.what());
    }
}

}  // namespace

json to_json(const agent::DecisionTrace& t) {
    json branch = json::array();
    for (const auto& s : t.active_branch) branch.push_back(step_json(s));
    return {{"sim_time", t.sim_time},
            {"phase", t.phase},
            {"active_branch", branch},
            {"selected_node", t.selected_node},
            {"emitted_action", to_json(t.emitted_action)}};
}

agent::DecisionTrace trace_from_json(const json& j) {
    expect_object(j, "decision trace");
    agent::DecisionTrace t;
    t.sim_time = get_number(j, "sim_time");
    t.phase = static_cast<int>(get_int(j, "phase"));
    const json& branch = field(j, "active_branch");
    expect_array(branch, "active_branch");
    for (const auto& s : branch) t.active_branch.push_back({get_string(s, "node"), get_bool(s, "result")});
    t.selected_node = get_string(j, "selected_node");
    t.emitted_action = world::action_from_json(field(j, "emitted_action"));
    return t;
}

json to_json(const WorldInfo& w) {
    return {{"width", w.width},
            {"height", w.height},
            {"towers", towers_json(w.towers)},
            {"crafting_table", to_json(w.crafting_table)},
            {"chest", to_json(w.chest)},
            {"plan", to_json(w.plan)},
            {"reach", w.reach},
            {"agent_speed", w.agent_speed},
            {"activity_radius", w.activity_radius},
            {"inventory_capacity", w.inventory_capacity},
            {"pickaxe_cost", w.pickaxe_cost},
            {"pickaxe_material", w.pickaxe_material},
            {"time_limit_s", w.time_limit_s},
            {"tick_rate_hz", w.tick_rate_hz}};
}

WorldInfo world_info_from_json(const json& j) {
    expect_object(j, "world_info");
    WorldInfo w;
    w.width = static_cast<int>(get_int(j, "width"));
    w.height = static_cast<int>(get_int(j, "height"));
    w.towers = towers_from_json(field(j, "towers"));
    w.crafting_table = world::voxel_from_json(field(j, "crafting_table"));
    w.chest = world::voxel_from_json(field(j, "chest"));
    w.plan = world::plan_from_json(field(j, "plan"));
    w.reach = get_number(j, "reach");
    w.agent_speed = get_number(j, "agent_speed");
    w.activity_radius = get_number(j, "activity_radius");
    w.inventory_capacity = static_cast<int>(get_int(j, "inventory_capacity"));
    w.pickaxe_cost = static_cast<int>(get_int(j, "pickaxe_cost"));
    w.pickaxe_material = get_string(j, "pickaxe_material");
    w.time_limit_s = get_number(j, "time_limit_s");
    w.tick_rate_hz = get_number(j, "tick_rate_hz");
    return w;
}

json to_json(const AgentView& v) {
    return {{"id", v.id},
            {"kind", world::to_string(v.kind)},
            {"position", to_json(v.position)},
            {"inventory", to_json(v.inventory)},
            {"held_item", v.held_item.empty() ? json(nullptr) : json(v.held_item)},
            {"looking_at", v.looking_at ? to_json(*v.looking_at) : json(nullptr)},
            {"behavior_state", world::to_string(v.behavior_state)},
            {"action", world::to_string(v.action)},
            {"can_place", v.can_place}};
}

AgentView agent_view_from_json(const json& j) {
    world::AgentState a = world::agent_from_observable(j);
    return {a.id, a.kind, a.position, a.inventory, a.held_item, a.looking_at, a.behavior_state, a.action, a.can_place};
}

json to_json(const StateUpdate& u) {
    json agents = json::array();
    for (const auto& a : u.agents) agents.push_back(to_json(a));
    return {{"agents", agents}, {"world", summary_json(u.world)}};
}

StateUpdate state_update_from_json(const json& j) {
    StateUpdate u;
    const json& agents = field(j, "agents");
    expect_array(agents, "agents");
    for (const auto& a : agents) u.agents.push_back(agent_view_from_json(a));
    u.world = summary_from_json(field(j, "world"));
    return u;
}

std::string encode_body(const Envelope& e) {
    json j{{"v", kSchemaVersion}, {"seq", e.seq}, {"sim_time", e.sim_time}};
    if (auto* s = std::get_if<ServerMessage>(&e.payload)) {
        j["origin"] = "server";
        j["payload"] = server_payload(*s);
    } else {
        j["origin"] = "client";
        j["payload"] = client_payload(std::get<ClientMessage>(e.payload));
    }
    return j.dump();
}

std::string encode(const Envelope& e) {
    std::string body = encode_body(e);
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string frame;
    frame.reserve(4 + body.size());
    frame.push_back(static_cast<char>((n >> 24) & 0xff));
    frame.push_back(static_cast<char>((n >> 16) & 0xff));
    frame.push_back(static_cast<char>((n >> 8) & 0xff));
    frame.push_back(static_cast<char>(n & 0xff));
    frame += body;
    return frame;
}

Envelope decode_body(std::string_view body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::malformed_frame, "body is not valid JSON");
    if (!j.is_object()) throw Error(Errc::malformed_frame, "body must be a JSON object");
    return wire_guard([&] {
        const json& v = field(j, "v");
        if (!v.is_number_integer()) throw Error(Errc::malformed_frame, "'v' must be an integer");
        if (v.get<std::int64_t>() != kSchemaVersion)
            throw Error(Errc::schema_version_mismatch, "got v=" + v.dump() + ", expected 1");
        Envelope e;
        e.seq = get_int(j, "seq");
        e.sim_time = get_number(j, "sim_time");
        const std::string origin = get_string(j, "origin");
        const json& payload = field(j, "payload");
        expect_object(payload, "payload");
        if (origin == "server") e.payload = server_from_payload(payload);
        else if (origin == "client") e.payload = client_from_payload(payload);
        else throw Error(Errc::malformed_frame, "origin must be 'server' or 'client'");
        return e;
    });
}

Envelope decode(std::string_view frame) {
    if (frame.size() < 4) throw Error(Errc::malformed_frame, "frame shorter than its length header");
    const auto* b = reinterpret_cast<const unsigned char*>(frame.data());
    const std::uint32_t n = (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | b[3];
    if (n != frame.size() - 4)
        throw Error(Errc::malformed_frame,
                    "length header says " + std::to_string(n) + " bytes, body has " + std::to_string(frame.size() - 4));
    return decode_body(frame.substr(4));
}

void FrameReader::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<std::string> FrameReader::next() {
    if (buffer_.size() < 4) return std::nullopt;
    const auto* b = reinterpret_cast<const unsigned char*>(buffer_.data());
    const std::uint32_t n = (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | b[3];
    if (n > kMaxFrame) throw Error(Errc::malformed_frame, "frame length " + std::to_string(n) + " exceeds limit");
    if (buffer_.size() < 4 + size_t(n)) return std::nullopt;
    std::string frame = buffer_.substr(0, 4 + n);
    buffer_.erase(0, 4 + n);
    return frame;
}

}  // namespace hmt::protocol

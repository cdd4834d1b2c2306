#include "hmt/orchestrator/command_brain.hpp"

#include <sstream>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"
#include "view.hpp"

namespace hmt::orchestrator {

using namespace hmt::protocol;
using command::SkillCall;
using Skill = SkillCall::Skill;

CommandBrain::CommandBrain(std::string id, CommandAgentOptions options)
    : id_(std::move(id)), options_(std::move(options)) {}

// Same capabilities as the human, including placing blocks.
Join CommandBrain::join_request() const { return {id_, world::AgentKind::ai, true}; }

std::string CommandBrain::summarize(const StateUpdate& u) const {
    std::ostringstream out;
    out << "clock " << format_seconds(u.world.clock) << " s, completion " << format_seconds(u.world.completion * 100)
        << "%, phase " << u.world.phase << "\nchest:";
    for (const auto& [m, n] : u.world.chest) out << " " << m << "=" << n;
    out << "\ntowers:";
    for (const auto& t : u.world.towers) out << " " << t.material << "@" << to_string(t.at) << "=" << t.remaining;
    for (const auto& a : u.agents) {
        out << "\n" << a.id << " at " << to_string(a.position.cell()) << " holding";
        for (const auto& [m, n] : a.inventory.counts) out << " " << m << "=" << n;
        if (a.inventory.has_tool(world::kPickaxe)) out << " pickaxe";
    }
    return out.str();
}

std::vector<ClientMessage> CommandBrain::on_message(const ServerMessage& msg, double sim_time) {
    if (const auto* j = std::get_if<Joined>(&msg)) {
        id_ = j->agent_id;
        info_ = j->world_info;
        for (const auto& t : info_->towers) options_.context.materials.insert(t.material);
        for (const auto& layer : info_->plan.layers) options_.context.materials.insert(layer.material);
    } else if (const auto* u = std::get_if<StateUpdate>(&msg)) {
        last_update_ = *u;
        auto out = collect_finished();
        if (auto a = step(*u)) out.push_back(*a);
        return out;
    } else if (const auto* c = std::get_if<ChatRelay>(&msg)) {
        if (c->from == id_ || c->text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
        const std::string summary = last_update_ ? summarize(*last_update_) : "not started";
        if (options_.background_interpretation) {
            in_flight_.push_back({sim_time, c->from, c->text,
                                  std::async(std::launch::async, [text = c->text, summary, model = options_.model,
                                                                  context = options_.context] {
                                      return command::interpret_command(text, summary, model.get(), context);
                                  })});
            return {};
        }
        return accept(sim_time, c->from, c->text,
                      command::interpret_command(c->text, summary, options_.model.get(), options_.context));
    } else if (const auto* e = std::get_if<ErrorNotice>(&msg)) {
        if (e->code == "agent_left") return {};
        // The current skill cannot proceed; drop it and let the human know.
        awaiting_ack_ = false;
        hold_until_ = sim_time + 0.5;
        if (!last_skill_.empty()) {
            const std::string failed = last_skill_;
            if (!last_skill_finished_ && !queue_.empty()) queue_.pop_front();
            last_skill_.clear();
            mine_baseline_ = -1;
            const std::string text = "I could not finish " + failed + " (" + e->code + ").";
            conversation_.entries.push_back({sim_time, id_, text, {}});
            return {ChatSend{text}};
        }
    }
    return {};
}

std::vector<ClientMessage> CommandBrain::accept(double sim_time, const std::string& from, const std::string& text,
                                                command::Interpretation in) {
    conversation_.entries.push_back({sim_time, from, text, in.skills});
    conversation_.entries.push_back({sim_time, id_, in.reply, {}});
    for (auto& s : in.skills) queue_.push_back(std::move(s));
    return {ChatSend{in.reply}};
}

// Finished interpretations in arrival order; a slow one holds back later ones.
std::vector<ClientMessage> CommandBrain::collect_finished() {
    std::vector<ClientMessage> out;
    while (!in_flight_.empty() &&
           in_flight_.front().result.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
        PendingChat p = std::move(in_flight_.front());
        in_flight_.pop_front();
        for (auto& m : accept(p.sim_time, p.from, p.text, p.result.get())) out.push_back(std::move(m));
    }
    return out;
}

std::optional<ClientMessage> CommandBrain::step(const StateUpdate& update) {
    if (!info_ || queue_.empty()) return std::nullopt;
    const AgentView* self = nullptr;
    for (const auto& a : update.agents)
        if (a.id == id_) self = &a;
    if (!self) return std::nullopt;
    const double now = update.world.clock;

    if (awaiting_ack_) {
        if (self->action != world::ActionKind::idle || now >= ack_deadline_) awaiting_ack_ = false;
        else return std::nullopt;
    }
    if (self->action == world::ActionKind::moving || self->action == world::ActionKind::mining) return std::nullopt;
    if (now < hold_until_) return std::nullopt;

    const View v(agent::Observation{id_, *info_, update}, *self);
    const auto& info = *info_;

    std::string current;  // description of the skill being worked on
    auto issue = [&](ActionRequest a, bool finished = false) -> std::optional<ClientMessage> {
        last_skill_ = current;
        last_skill_finished_ = finished;
        awaiting_ack_ = true;
        ack_deadline_ = now + 0.5;
        return ActionMsg{std::move(a)};
    };
    auto finish = [&] {
        queue_.pop_front();
        mine_baseline_ = -1;
    };
    auto give_up = [&](const std::string& why) -> std::optional<ClientMessage> {
        const std::string text = "I could not finish " + command::describe(queue_.front()) + " (" + why + ").";
        finish();
        conversation_.entries.push_back({now, id_, text, {}});
        hold_until_ = now + 0.5;
        return ChatSend{text};
    };
    auto approach_or_fail = [&](Voxel target) -> std::optional<ClientMessage> {
        const ActionRequest a = v.approach(target);
        if (std::holds_alternative<world::Idle>(a)) return give_up("unreachable");
        return issue(a);
    };

    // Loop so that instantly finished skills do not cost a tick each.
    for (int guard = 0; guard < 16 && !queue_.empty(); ++guard) {
        const SkillCall& s = queue_.front();
        current = command::describe(s);
        switch (s.skill) {
            case Skill::go_to: {
                if (s.cell) {
                    if (self->position.cell() == *s.cell) {
                        finish();
                        continue;
                    }
                    nav::NavGrid g = v.grid;
                    const Voxel here = self->position.cell();
                    if (g.in_bounds(here)) g.set_blocked(here, false);
                    if (!g.walkable(*s.cell) || !nav::plan_path(g, here, *s.cell)) return give_up("unreachable");
                    return issue(world::MoveTo{*s.cell});
                }
                std::optional<Voxel> target;
                for (const auto& l : agent::landmarks_of(info))
                    if (l.name == s.landmark) {
                        if (!target || distance(self->position, center_of(l.cell)) <
                                           distance(self->position, center_of(*target)))
                            target = l.cell;
                    }
                if (!target) return give_up("unknown landmark");
                if (s.landmark == "plan_centroid") {
                    if (distance(self->position, center_of(*target)) <= info.reach + 1e-9) {
                        finish();
                        continue;
                    }
                    return approach_or_fail(*target);
                }
                if (v.reach(*target)) {
                    finish();
                    continue;
                }
                return approach_or_fail(*target);
            }
            case Skill::mine: {
                const int have = self->inventory.count(s.material);
                if (mine_baseline_ < 0) mine_baseline_ = have;
                if (have > mine_baseline_) {
                    finish();
                    continue;
                }
                if (self->inventory.total() >= info.inventory_capacity) return give_up("inventory_full");
                const ActionRequest a = v.mine(s.material);
                if (std::holds_alternative<world::Idle>(a)) return give_up("no reachable " + s.material + " tower");
                return issue(a);
            }
            case Skill::craft: {
                if (!v.reach(info.crafting_table)) return approach_or_fail(info.crafting_table);
                const world::Craft c{s.item};
                finish();
                return issue(c, true);
            }
            case Skill::chest_deposit:
            case Skill::chest_withdraw: {
                if (!v.reach(info.chest)) return approach_or_fail(info.chest);
                const auto dir = s.skill == Skill::chest_deposit ? world::ChestDirection::deposit
                                                                 : world::ChestDirection::withdraw;
                int n = s.n;
                if (dir == world::ChestDirection::deposit) n = std::min(n, self->inventory.count(s.material));
                if (n <= 0) return give_up("nothing to deposit");
                const world::ChestOp op{dir, s.material, n};
                finish();
                return issue(op, true);
            }
            case Skill::place: {
                if (!v.reach(*s.cell)) return approach_or_fail(*s.cell);
                const world::Place p{*s.cell, s.material};
                finish();
                return issue(p, true);
            }
            case Skill::say: {
                const std::string text = s.text;
                finish();
                conversation_.entries.push_back({now, id_, text, {}});
                return ChatSend{text};
            }
        }
    }
    return std::nullopt;
}

}  // namespace hmt::orchestrator

#include "netbench/control.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "netbench/errors.hpp"
#include "netbench/topology.hpp"
#include "netbench/util.hpp"

namespace netbench {

const char* action_kind_name(ActionKind kind) {
    switch (kind) {
        case ActionKind::SetBandwidth: return "set_bandwidth";
        case ActionKind::SetDelay: return "set_delay";
        case ActionKind::SetQueueCapacity: return "set_queue_capacity";
        case ActionKind::SetPriority: return "set_priority";
        case ActionKind::LinkDown: return "link_down";
        case ActionKind::LinkUp: return "link_up";
        case ActionKind::SetVmCores: return "set_vm_cores";
        case ActionKind::SetVmRam: return "set_vm_ram";
    }
    return "?";
}

namespace {

std::optional<ActionKind> parse_action_kind(std::string_view s) {
    if (s == "set_bandwidth") return ActionKind::SetBandwidth;
    if (s == "set_delay") return ActionKind::SetDelay;
    if (s == "set_queue_capacity") return ActionKind::SetQueueCapacity;
    if (s == "set_priority") return ActionKind::SetPriority;
    if (s == "link_down") return ActionKind::LinkDown;
    if (s == "link_up") return ActionKind::LinkUp;
    if (s == "set_vm_cores") return ActionKind::SetVmCores;
    if (s == "set_vm_ram") return ActionKind::SetVmRam;
    return std::nullopt;
}

bool takes_value(ActionKind kind) {
    return kind != ActionKind::LinkDown && kind != ActionKind::LinkUp;
}

}  // namespace

ControlPlan parse_control(std::string_view text) {
    ControlPlan plan;
    std::set<std::tuple<double, std::string, ActionKind>> seen;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        std::string stripped = strip_comment(raw);
        auto tok = split_ws(stripped);
        if (tok.empty()) continue;

        if (tok.size() < 3 || tok[0].rfind("t=", 0) != 0)
            throw SyntaxError(line_no, "expected: t=<s> <kind> <target-key>=<id> [value=...]");
        auto t = parse_double(std::string_view(tok[0]).substr(2));
        if (!t || *t < 0) throw SyntaxError(line_no, "invalid time '" + tok[0] + "'");
        auto kind = parse_action_kind(tok[1]);
        if (!kind) throw SyntaxError(line_no, "unknown action '" + tok[1] + "'");

        ControlAction act;
        act.t = *t;
        act.kind = *kind;

        bool have_target = false, have_value = false;
        for (size_t i = 2; i < tok.size(); ++i) {
            size_t eq = tok[i].find('=');
            if (eq == std::string::npos)
                throw SyntaxError(line_no, "expected key=value, got '" + tok[i] + "'");
            std::string key = tok[i].substr(0, eq);
            std::string val = tok[i].substr(eq + 1);
            if (key == "link" || key == "vm" || key == "flow") {
                if (have_target) throw SyntaxError(line_no, "duplicate target");
                act.target = val;
                act.target_type = key == "link" ? ControlAction::TargetType::Link
                                : key == "vm"   ? ControlAction::TargetType::Vm
                                                : ControlAction::TargetType::Flow;
                have_target = true;
            } else if (key == "value") {
                if (have_value) throw SyntaxError(line_no, "duplicate value");
                act.value_text = val;
                have_value = true;
            } else {
                throw SyntaxError(line_no, "unknown key '" + key + "'");
            }
        }
        if (!have_target) throw SyntaxError(line_no, "missing target");
        if (takes_value(act.kind) != have_value)
            throw SyntaxError(line_no, have_value ? "action takes no value" : "missing value");

        switch (act.kind) {
            case ActionKind::SetBandwidth: {
                auto rate = Rate::parse(act.value_text);
                if (!rate || rate->bps() <= 0)
                    throw SyntaxError(line_no, "bandwidth must be positive, got '" + act.value_text + "'");
                act.value = rate->bps();
                break;
            }
            case ActionKind::SetDelay: {
                auto dur = Duration::parse(act.value_text);
                if (!dur || dur->seconds() < 0)
                    throw SyntaxError(line_no, "delay must be >= 0, got '" + act.value_text + "'");
                act.value = dur->seconds();
                break;
            }
            case ActionKind::SetQueueCapacity: {
                auto v = parse_i64(act.value_text);
                if (!v || *v < 0) throw SyntaxError(line_no, "queue capacity must be >= 0");
                act.value = static_cast<double>(*v);
                break;
            }
            case ActionKind::SetPriority: {
                auto v = parse_i64(act.value_text);
                if (!v || *v < 0 || *v > 7) throw SyntaxError(line_no, "priority must be 0..7");
                if (act.target_type != ControlAction::TargetType::Flow)
                    throw SyntaxError(line_no, "set_priority targets a flow");
                act.value = static_cast<double>(*v);
                break;
            }
            case ActionKind::SetVmCores: {
                auto v = parse_i64(act.value_text);
                if (!v || *v < 1) throw SyntaxError(line_no, "cores must be >= 1");
                if (act.target_type != ControlAction::TargetType::Vm)
                    throw SyntaxError(line_no, "set_vm_cores targets a vm");
                act.value = static_cast<double>(*v);
                break;
            }
            case ActionKind::SetVmRam: {
                auto v = parse_u64(act.value_text);
                if (!v || *v == 0) throw SyntaxError(line_no, "ram must be positive bytes");
                if (act.target_type != ControlAction::TargetType::Vm)
                    throw SyntaxError(line_no, "set_vm_ram targets a vm");
                act.value = static_cast<double>(*v);
                break;
            }
            case ActionKind::LinkDown:
            case ActionKind::LinkUp:
                if (act.target_type != ControlAction::TargetType::Link)
                    throw SyntaxError(line_no, "link_down/link_up target a link");
                break;
        }
        if (act.kind == ActionKind::SetBandwidth || act.kind == ActionKind::SetDelay ||
            act.kind == ActionKind::SetQueueCapacity) {
            if (act.target_type != ControlAction::TargetType::Link)
                throw SyntaxError(line_no, std::string(action_kind_name(act.kind)) + " targets a link");
        }

        if (!seen.insert({act.t, act.target, act.kind}).second)
            throw SyntaxError(line_no, "duplicate action (same t, target, kind)");
        plan.actions.push_back(std::move(act));
    }
    std::stable_sort(plan.actions.begin(), plan.actions.end(),
                     [](const ControlAction& a, const ControlAction& b) { return a.t < b.t; });
    return plan;
}

}  // namespace netbench

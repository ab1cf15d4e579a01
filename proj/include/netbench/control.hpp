#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace netbench {

enum class ActionKind {
    SetBandwidth,
    SetDelay,
    SetQueueCapacity,
    SetPriority,
    LinkDown,
    LinkUp,
    SetVmCores,
    SetVmRam,
};

const char* action_kind_name(ActionKind kind);

struct ControlAction {
    double t = 0;
    ActionKind kind = ActionKind::SetBandwidth;
    enum class TargetType { Link, Vm, Flow };
    TargetType target_type = TargetType::Link;
    std::string target;      // link: device:iface, vm: name, flow: id
    double value = 0;        // bps | seconds | packets | priority | cores | bytes
    std::string value_text;  // as written, for the event log

    bool operator==(const ControlAction&) const = default;
};

struct ControlPlan {
    std::vector<ControlAction> actions;  // sorted by t

    bool operator==(const ControlPlan&) const = default;
};

// Line format: t=<s> <kind> <link|vm|flow>=<id> [value=<n><unit>]
// Sorted plan; duplicate (t, target, kind) rejected; value constraints
// (bandwidth > 0, delay >= 0, capacity >= 0, cores >= 1, priority 0..7)
// enforced here. Target existence is checked when the plan is bound.
ControlPlan parse_control(std::string_view text);

}  // namespace netbench

#include "doctest.h"

#include <string>
#include <utility>
#include <vector>

#include "netbench/control.hpp"
#include "netbench/errors.hpp"

using namespace netbench;

TEST_CASE("control plan parses every action kind") {
    auto plan = parse_control(R"(
# schedule
t=5 set_bandwidth link=R1:FastEthernet0/1 value=50mbps
t=10 set_delay link=R1:FastEthernet0/1 value=5ms
t=15 set_queue_capacity link=R1:FastEthernet0/1 value=16
t=20 link_down link=R1:FastEthernet0/1
t=25 link_up link=R1:FastEthernet0/1
t=30 set_vm_cores vm=VM1_db value=4
t=35 set_vm_ram vm=VM1_db value=1073741824
t=40 set_priority flow=3 value=7
)");
    REQUIRE(plan.actions.size() == 8);
    CHECK(plan.actions[0].kind == ActionKind::SetBandwidth);
    CHECK(plan.actions[0].t == 5.0);
    CHECK(plan.actions[0].target_type == ControlAction::TargetType::Link);
    CHECK(plan.actions[0].target == "R1:FastEthernet0/1");
    CHECK(plan.actions[0].value == 50e6);
    CHECK(plan.actions[0].value_text == "50mbps");
    CHECK(plan.actions[1].kind == ActionKind::SetDelay);
    CHECK(plan.actions[1].value == 0.005);
    CHECK(plan.actions[2].kind == ActionKind::SetQueueCapacity);
    CHECK(plan.actions[2].value == 16.0);
    CHECK(plan.actions[3].kind == ActionKind::LinkDown);
    CHECK(plan.actions[4].kind == ActionKind::LinkUp);
    CHECK(plan.actions[5].kind == ActionKind::SetVmCores);
    CHECK(plan.actions[5].target_type == ControlAction::TargetType::Vm);
    CHECK(plan.actions[5].value == 4.0);
    CHECK(plan.actions[6].kind == ActionKind::SetVmRam);
    CHECK(plan.actions[6].value == 1073741824.0);
    CHECK(plan.actions[7].kind == ActionKind::SetPriority);
    CHECK(plan.actions[7].target_type == ControlAction::TargetType::Flow);
    CHECK(plan.actions[7].target == "3");
    CHECK(plan.actions[7].value == 7.0);
}

TEST_CASE("actions are sorted by time, stable for equal times") {
    auto plan = parse_control("t=9 link_down link=A:e0\n"
                              "t=3 link_up link=A:e0\n"
                              "t=9 set_delay link=B:e0 value=1ms\n");
    REQUIRE(plan.actions.size() == 3);
    CHECK(plan.actions[0].t == 3.0);
    CHECK(plan.actions[1].kind == ActionKind::LinkDown);  // first among the t=9 pair
    CHECK(plan.actions[2].kind == ActionKind::SetDelay);
}

TEST_CASE("duplicate time target kind is rejected") {
    CHECK_THROWS_AS(parse_control("t=5 link_down link=A:e0\nt=5 link_down link=A:e0\n"), SyntaxError);
    // same instant, different kind or target is fine
    CHECK_NOTHROW(parse_control("t=5 link_down link=A:e0\nt=5 link_down link=B:e0\n"));
    CHECK_NOTHROW(parse_control("t=5 link_down link=A:e0\nt=5 set_delay link=A:e0 value=1ms\n"));
    // and the same action at another time is fine
    CHECK_NOTHROW(parse_control("t=5 link_down link=A:e0\nt=6 link_down link=A:e0\n"));
}

TEST_CASE("value constraints per kind") {
    CHECK_THROWS_AS(parse_control("t=0 set_bandwidth link=A:e0 value=0mbps\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_bandwidth link=A:e0 value=10\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_delay link=A:e0 value=-1ms\n"), SyntaxError);
    CHECK_NOTHROW(parse_control("t=0 set_delay link=A:e0 value=0ms\n"));
    CHECK_THROWS_AS(parse_control("t=0 set_queue_capacity link=A:e0 value=-1\n"), SyntaxError);
    CHECK_NOTHROW(parse_control("t=0 set_queue_capacity link=A:e0 value=0\n"));
    CHECK_THROWS_AS(parse_control("t=0 set_vm_cores vm=V value=0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_vm_ram vm=V value=0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_priority flow=1 value=8\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_priority flow=1 value=-1\n"), SyntaxError);
    CHECK_NOTHROW(parse_control("t=0 set_priority flow=1 value=7\n"));
}

TEST_CASE("target key must match the kind") {
    CHECK_THROWS_AS(parse_control("t=0 set_bandwidth vm=V value=10mbps\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_vm_cores link=A:e0 value=2\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 set_priority vm=V value=3\n"), SyntaxError);
    CHECK_THROWS_AS(parse_control("t=0 link_down flow=1\n"), SyntaxError);
}

TEST_CASE("malformed lines carry their line number") {
    for (const auto& [text, line] : std::vector<std::pair<const char*, int>>{
             {"t=0 warp_speed link=A:e0\n", 1},             // unknown kind
             {"set_bandwidth link=A:e0 value=1mbps\n", 1},  // missing t
             {"t=-1 link_down link=A:e0\n", 1},             // negative t
             {"t=0 link_down\n", 1},                        // missing target
             {"t=0 link_down link=A:e0 value=3\n", 1},      // stray value
             {"t=0 set_bandwidth link=A:e0\n", 1},          // missing value
             {"# ok\nt=0 set_vm_cores vm=V value=1.5\n", 2},// non-integer cores
         }) {
        try {
            parse_control(text);
            FAIL_CHECK("expected SyntaxError for: " << text);
        } catch (const SyntaxError& e) {
            CHECK(e.line() == line);
        }
    }
}

TEST_CASE("empty and comment-only plans are empty") {
    CHECK(parse_control("").actions.empty());
    CHECK(parse_control("# nothing here\n\n").actions.empty());
}

TEST_CASE("action kind names round the event log format") {
    CHECK(std::string(action_kind_name(ActionKind::SetBandwidth)) == "set_bandwidth");
    CHECK(std::string(action_kind_name(ActionKind::LinkDown)) == "link_down");
    CHECK(std::string(action_kind_name(ActionKind::SetVmRam)) == "set_vm_ram");
    CHECK(std::string(action_kind_name(ActionKind::SetPriority)) == "set_priority");
}

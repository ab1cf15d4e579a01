#include "doctest.h"

#include <cmath>

#include "netbench/cloud.hpp"

using namespace netbench;

// Hand-solved processor-sharing schedules. With a one-core-per-request cap,
// k active requests on c cores each progress at min(1, c/k) core-seconds per
// second, so completion times follow from piecewise-linear integration.

TEST_CASE("two equal jobs on one core finish together at 2s") {
    VmRuntime vm(1, 1 << 20, 0);
    CHECK(vm.admit(1, 0.0, 1.0, 0, 0) == VmRuntime::Admit::Accepted);
    CHECK(vm.admit(2, 0.0, 1.0, 0, 0) == VmRuntime::Admit::Accepted);
    auto next = vm.next_completion();
    REQUIRE(next);
    CHECK(*next == 2.0);  // exact: rate 1/2 each, dyadic arithmetic
    auto done = vm.pop_completed(2.0);
    CHECK(done.size() == 2);
    CHECK(vm.active() == 0);
}

TEST_CASE("staggered arrivals on one core: 1.75, 2.75, 3.0") {
    // A(work 1 at t=0), B(1 at 0.5), C(1 at 1). Piecewise shares:
    // [0,0.5) k=1; [0.5,1) k=2; then k=3 until A leaves at 1.75, etc.
    VmRuntime vm(1, 1 << 20, 0);
    vm.admit(1, 0.0, 1.0, 0, 0);
    vm.admit(2, 0.5, 1.0, 0, 0);
    vm.admit(3, 1.0, 1.0, 0, 0);

    auto t1 = vm.next_completion();
    REQUIRE(t1);
    CHECK(*t1 == doctest::Approx(1.75).epsilon(1e-9));
    auto d1 = vm.pop_completed(*t1);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].flow_id == 1);

    auto t2 = vm.next_completion();
    REQUIRE(t2);
    CHECK(*t2 == doctest::Approx(2.75).epsilon(1e-9));
    auto d2 = vm.pop_completed(*t2);
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].flow_id == 2);

    auto t3 = vm.next_completion();
    REQUIRE(t3);
    CHECK(*t3 == doctest::Approx(3.0).epsilon(1e-9));
    auto d3 = vm.pop_completed(*t3);
    REQUIRE(d3.size() == 1);
    CHECK(d3[0].flow_id == 3);
    CHECK(!vm.next_completion());
}

TEST_CASE("per-request cap: two jobs on two cores run at full speed") {
    VmRuntime vm(2, 1 << 20, 0);
    vm.admit(1, 0.0, 1.0, 0, 0);
    vm.admit(2, 0.0, 1.0, 0, 0);
    CHECK(vm.next_completion() == 1.0);  // rate min(1, 2/2) = 1 each
    CHECK(vm.cpu_used() == 2.0);
    // a third job forces sharing: rate 2/3
    vm.admit(3, 0.0, 1.0, 0, 0);
    CHECK(vm.cpu_used() == 2.0);
    auto t = vm.next_completion();
    REQUIRE(t);
    CHECK(*t == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("one job on many cores is capped at one core") {
    VmRuntime vm(8, 1 << 20, 0);
    vm.admit(1, 0.0, 2.0, 0, 0);
    CHECK(vm.next_completion() == 2.0);
    CHECK(vm.cpu_used() == 1.0);  // not 8
}

TEST_CASE("file completion is the later of cpu and disk terms") {
    // disk 100 bytes/s; 1000 bytes -> 10 s floor even though cpu is fast
    VmRuntime vm(1, 1 << 20, 100.0);
    vm.admit(1, 0.0, 0.5, 0, 1000);
    auto t = vm.next_completion();
    REQUIRE(t);
    CHECK(*t == 10.0);
    CHECK(vm.pop_completed(9.99).empty());  // cpu done, disk not
    CHECK(vm.pop_completed(10.0).size() == 1);

    // and the other way round: slow cpu dominates
    VmRuntime vm2(1, 1 << 20, 1e9);
    vm2.admit(1, 0.0, 3.0, 0, 1000);
    CHECK(*vm2.next_completion() == 3.0);
}

TEST_CASE("ram admission control rejects and counts") {
    VmRuntime vm(1, 1000, 0);
    CHECK(vm.admit(1, 0.0, 1.0, 600, 0) == VmRuntime::Admit::Accepted);
    CHECK(vm.ram_used() == 600);
    CHECK(vm.admit(2, 0.0, 1.0, 600, 0) == VmRuntime::Admit::Rejected);
    CHECK(vm.rejects() == 1);
    CHECK(vm.active() == 1);
    // exact fit is allowed
    CHECK(vm.admit(3, 0.0, 1.0, 400, 0) == VmRuntime::Admit::Accepted);
    CHECK(vm.ram_used() == 1000);
    // completion releases the footprint
    auto done = vm.pop_completed(100.0);
    CHECK(done.size() == 2);
    CHECK(vm.ram_used() == 0);
}

TEST_CASE("zero footprint requests always fit") {
    VmRuntime vm(1, 0, 0);
    CHECK(vm.admit(1, 0.0, 1.0, 0, 0) == VmRuntime::Admit::Accepted);
    CHECK(vm.rejects() == 0);
}

TEST_CASE("advance is idempotent at a fixed instant") {
    VmRuntime vm(1, 1 << 20, 0);
    vm.admit(1, 0.0, 1.0, 0, 0);
    vm.advance(0.5);
    vm.advance(0.5);
    vm.advance(0.5);
    CHECK(*vm.next_completion() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cpu accounting tracks active requests") {
    VmRuntime vm(2, 1 << 20, 1000.0);
    CHECK(vm.cpu_used() == 0.0);
    vm.admit(1, 0.0, 10.0, 0, 0);
    CHECK(vm.cpu_active() == 1);
    CHECK(vm.cpu_used() == 1.0);
    vm.admit(2, 0.0, 10.0, 0, 0);
    vm.admit(3, 0.0, 10.0, 0, 0);
    CHECK(vm.cpu_active() == 3);
    CHECK(vm.cpu_used() == 2.0);  // capped by the allocation

    // a request whose cpu work is spent but disk is pending stops using cpu
    VmRuntime vm2(1, 1 << 20, 10.0);
    vm2.admit(1, 0.0, 0.1, 0, 1000);  // cpu done at 0.1, disk at 100
    vm2.advance(1.0);
    CHECK(vm2.active() == 1);
    CHECK(vm2.cpu_active() == 0);
    CHECK(vm2.cpu_used() == 0.0);
}

TEST_CASE("growing the allocation speeds up remaining work") {
    VmRuntime vm(1, 1 << 20, 0);
    vm.admit(1, 0.0, 1.0, 0, 0);
    vm.admit(2, 0.0, 1.0, 0, 0);
    // after 1s at rate 1/2 each, half the work remains
    vm.advance(1.0);
    vm.set_alloc_cores(2);
    auto t = vm.next_completion();
    REQUIRE(t);
    CHECK(*t == doctest::Approx(1.5).epsilon(1e-9));  // full rate from here
}

TEST_CASE("shrinking ram blocks new admissions but not running work") {
    VmRuntime vm(1, 1000, 0);
    vm.admit(1, 0.0, 1.0, 800, 0);
    vm.set_alloc_ram(500);
    CHECK(vm.admit(2, 0.0, 1.0, 100, 0) == VmRuntime::Admit::Rejected);  // 800+100 > 500
    CHECK(vm.active() == 1);
    CHECK(*vm.next_completion() == 1.0);
}

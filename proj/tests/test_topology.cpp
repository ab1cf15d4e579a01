#include "doctest.h"

#include <algorithm>

#include "netbench/errors.hpp"
#include "netbench/topology.hpp"

using namespace netbench;

namespace {

// Router-on-a-stick with three dot1q subinterfaces behind one trunk. The
// shape every other fixture here is a variation of.
const char* kBench = R"(
device R1 router
  interface FastEthernet0/0
    ip address 10.0.0.1 255.255.255.0
  interface FastEthernet0/1
  interface FastEthernet0/1.100
    encapsulation dot1q 100 native
    ip address 192.168.100.1 255.255.255.0
  interface FastEthernet0/1.101
    encapsulation dot1q 101
    ip address 192.168.101.1 255.255.255.0
  interface FastEthernet0/1.102
    encapsulation dot1q 102
    ip address 192.168.102.1 255.255.255.0

device SW1 switch
  interface FastEthernet0/1
    switchport mode trunk
    switchport trunk allowed vlan 100-102
  interface FastEthernet0/2
    switchport mode access
    switchport access vlan 100
  interface FastEthernet0/3
    switchport mode access
    switchport access vlan 101

device PC1 host
  interface eth0
    ip address 10.0.0.10 255.255.255.0

device SRV_SUN server
  cores 4
  ram 8589934592
  disk 209715200
  interface eth0
    ip address 192.168.100.2 255.255.255.0
  interface eth1
    ip address 192.168.101.2 255.255.255.0

vm VM1_db host SRV_SUN cores 2 ram 2147483648 ip 192.168.100.10
vm VM1_file host SRV_SUN cores 1 ram 1073741824 ip 192.168.101.10

service VM1_db db db cpu_fixed 0.002 cpu_per_byte 0.00000001 footprint 33554432 resp fixed:65536
service VM1_file fs file cpu_fixed 0.001 cpu_per_byte 0.000000002 footprint 67108864 resp mult:16

link PC1:eth0 R1:FastEthernet0/0 bandwidth 100mbps delay 1ms queue 64
link R1:FastEthernet0/1 SW1:FastEthernet0/1 bandwidth 100mbps delay 1ms queue 64
link SW1:FastEthernet0/2 SRV_SUN:eth0 bandwidth 100mbps delay 1ms queue 64
link SW1:FastEthernet0/3 SRV_SUN:eth1 bandwidth 100mbps delay 1ms queue 64
)";

TopologyDoc bench() { return parse_topology(kBench); }

}  // namespace

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

TEST_CASE("trunk stanza yields allowed vlan set 100-102") {
    auto doc = bench();
    const auto* sw = doc.find_device("SW1");
    REQUIRE(sw);
    const auto* trunk = sw->find_interface("FastEthernet0/1");
    REQUIRE(trunk);
    CHECK(trunk->mode == PortMode::Trunk);
    CHECK(trunk->allowed_vlans == std::set<int>{100, 101, 102});
}

TEST_CASE("comma and range vlan lists parse the same set") {
    auto doc = parse_topology(R"(
device S switch
  interface f0/1
    switchport mode trunk
    switchport trunk allowed vlan 100,102
  interface f0/2
    switchport mode trunk
    switchport trunk allowed vlan 7
)");
    CHECK(doc.devices[0].interfaces[0].allowed_vlans == std::set<int>{100, 102});
    CHECK(doc.devices[0].interfaces[1].allowed_vlans == std::set<int>{7});
}

TEST_CASE("subinterface encapsulation carries vlan id and native flag") {
    auto doc = bench();
    const auto* r1 = doc.find_device("R1");
    REQUIRE(r1);
    const auto* sub100 = r1->find_interface("FastEthernet0/1.100");
    REQUIRE(sub100);
    REQUIRE(sub100->encapsulation);
    CHECK(sub100->encapsulation->vlan_id == 100);
    CHECK(sub100->encapsulation->native);
    const auto* sub101 = r1->find_interface("FastEthernet0/1.101");
    REQUIRE(sub101);
    REQUIRE(sub101->encapsulation);
    CHECK(sub101->encapsulation->vlan_id == 101);
    CHECK(!sub101->encapsulation->native);
    CHECK(sub100->ip->address == *parse_ipv4("192.168.100.1"));
    CHECK(sub100->ip->prefix_len == 24);
}

TEST_CASE("server attrs and vm stanzas parse") {
    auto doc = bench();
    const auto* srv = doc.find_device("SRV_SUN");
    REQUIRE(srv);
    REQUIRE(srv->server);
    CHECK(srv->server->cores == 4);
    CHECK(srv->server->ram_bytes == 8589934592ull);
    CHECK(srv->server->disk_bytes_per_s == 209715200ull);
    const auto* db = doc.find_vm("VM1_db");
    REQUIRE(db);
    CHECK(db->host == "SRV_SUN");
    CHECK(db->alloc_cores == 2);
    CHECK(db->alloc_ram == 2147483648ull);
    CHECK(db->address == *parse_ipv4("192.168.100.10"));
    REQUIRE(db->services.size() == 1);
    CHECK(db->services[0].name == "db");
    CHECK(db->services[0].kind == ServiceKind::Db);
    CHECK(db->services[0].cpu_fixed_s == 0.002);
    CHECK(db->services[0].response.kind == ResponseRule::Kind::Fixed);
    CHECK(db->services[0].response.value == 65536.0);
    const auto* fs = doc.find_vm("VM1_file");
    REQUIRE(fs);
    CHECK(fs->services[0].response.kind == ResponseRule::Kind::Multiplier);
    CHECK(fs->services[0].response.value == 16.0);
}

TEST_CASE("link stanza parses endpoints and symbolic units") {
    auto doc = bench();
    REQUIRE(doc.links.size() == 4);
    const auto& l = doc.links[1];
    CHECK(l.a.device == "R1");
    CHECK(l.a.iface == "FastEthernet0/1");
    CHECK(l.b.device == "SW1");
    CHECK(l.bandwidth.bps() == 100e6);
    CHECK(l.bandwidth.unit == Rate::Unit::Mbps);
    CHECK(l.prop_delay.seconds() == 0.001);
    CHECK(l.queue_capacity == 64);
}

TEST_CASE("comments and blank lines are ignored") {
    auto doc = parse_topology("# leading comment\n\ndevice A host # trailing\n  interface e0 # x\n");
    REQUIRE(doc.devices.size() == 1);
    CHECK(doc.devices[0].interfaces.size() == 1);
}

TEST_CASE("rate and duration parse all units case-insensitively") {
    CHECK(Rate::parse("10mbps")->bps() == 10e6);
    CHECK(Rate::parse("10Mbps")->bps() == 10e6);
    CHECK(Rate::parse("2gbps")->bps() == 2e9);
    CHECK(Rate::parse("64kbps")->bps() == 64e3);
    CHECK(Rate::parse("300bps")->bps() == 300.0);
    CHECK(!Rate::parse("10"));
    CHECK(!Rate::parse("mbps"));
    CHECK(!Rate::parse("10xbps"));
    CHECK(Duration::parse("5ms")->seconds() == 0.005);
    CHECK(Duration::parse("10us")->seconds() == 10.0 * 1e-6);
    CHECK(Duration::parse("2s")->seconds() == 2.0);
    CHECK(!Duration::parse("5"));
    CHECK(!Duration::parse("ms"));
}

TEST_CASE("rate and duration to_string round-trip") {
    for (const char* s : {"10mbps", "1.5gbps", "300bps", "64kbps"}) {
        auto r = Rate::parse(s);
        REQUIRE(r);
        CHECK(Rate::parse(r->to_string()) == r);
    }
    for (const char* s : {"5ms", "10us", "0.25s"}) {
        auto d = Duration::parse(s);
        REQUIRE(d);
        CHECK(Duration::parse(d->to_string()) == d);
    }
}

TEST_CASE("response rule arithmetic") {
    ResponseRule fixed{ResponseRule::Kind::Fixed, 65536};
    CHECK(fixed.response_bytes(4096) == 65536);
    ResponseRule mult{ResponseRule::Kind::Multiplier, 16};
    CHECK(mult.response_bytes(4096) == 65536);
    ResponseRule echo{ResponseRule::Kind::Multiplier, 1};
    CHECK(echo.response_bytes(12345) == 12345);
    ResponseRule half{ResponseRule::Kind::Multiplier, 0.5};
    CHECK(half.response_bytes(5) == 3);  // llround(2.5)
}

// ---------------------------------------------------------------------------
// parse errors
// ---------------------------------------------------------------------------

TEST_CASE("unknown keyword is a SyntaxError naming the line") {
    try {
        parse_topology("device A host\n  interface e0\n  frobnicate 3\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("malformed dot1q id is a SyntaxError naming the line") {
    try {
        parse_topology("device R router\n  interface f0/1\n  interface f0/1.100\n    encapsulation dot1q abc\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("duplicate device name throws DuplicateDeviceError") {
    CHECK_THROWS_AS(parse_topology("device A host\ndevice A host\n"), DuplicateDeviceError);
}

TEST_CASE("link to a missing interface throws DanglingLinkEndpointError") {
    CHECK_THROWS_AS(
        parse_topology("device A host\n  interface e0\ndevice B host\n  interface e0\n"
                       "link A:e0 B:e9 bandwidth 1mbps delay 0s queue 8\n"),
        DanglingLinkEndpointError);
}

TEST_CASE("interface reused by two links is a SyntaxError") {
    CHECK_THROWS_AS(
        parse_topology("device A host\n  interface e0\ndevice B host\n  interface e0\ndevice C host\n  interface e0\n"
                       "link A:e0 B:e0 bandwidth 1mbps delay 0s queue 8\n"
                       "link A:e0 C:e0 bandwidth 1mbps delay 0s queue 8\n"),
        SyntaxError);
}

TEST_CASE("subinterface on a switch is rejected") {
    CHECK_THROWS_AS(parse_topology("device S switch\n  interface f0/1\n  interface f0/1.100\n    encapsulation dot1q 100\n"),
                    SyntaxError);
}

TEST_CASE("subinterface without declared parent is rejected") {
    CHECK_THROWS_AS(parse_topology("device R router\n  interface f0/1.100\n    encapsulation dot1q 100\n"),
                    SyntaxError);
}

TEST_CASE("subinterface without encapsulation is rejected") {
    CHECK_THROWS_AS(parse_topology("device R router\n  interface f0/1\n  interface f0/1.100\n    ip address 10.0.0.1 255.255.255.0\n"),
                    SyntaxError);
}

TEST_CASE("encapsulation on a physical interface is rejected") {
    CHECK_THROWS_AS(parse_topology("device R router\n  interface f0/1\n    encapsulation dot1q 100\n"),
                    SyntaxError);
}

TEST_CASE("two native subinterfaces under one parent are rejected") {
    CHECK_THROWS_AS(parse_topology("device R router\n  interface f0/1\n"
                                   "  interface f0/1.1\n    encapsulation dot1q 1 native\n"
                                   "  interface f0/1.2\n    encapsulation dot1q 2 native\n"),
                    SyntaxError);
}

TEST_CASE("address on a parent that has subinterfaces is rejected") {
    CHECK_THROWS_AS(parse_topology("device R router\n  interface f0/1\n    ip address 10.0.0.1 255.255.255.0\n"
                                   "  interface f0/1.1\n    encapsulation dot1q 1\n"),
                    SyntaxError);
}

TEST_CASE("vlan id out of range is rejected") {
    CHECK_THROWS_AS(parse_topology("device R router\n  interface f0/1\n  interface f0/1.5000\n    encapsulation dot1q 5000\n"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_topology("device S switch\n  interface f0/1\n    switchport mode access\n    switchport access vlan 0\n"),
                    SyntaxError);
}

TEST_CASE("server without full resource envelope is rejected") {
    CHECK_THROWS_AS(parse_topology("device S server\n  cores 2\n  ram 1024\n  interface e0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_topology("device S server\n  cores 0\n  ram 1024\n  disk 100\n  interface e0\n"), SyntaxError);
}

TEST_CASE("vm referencing a missing or non-server host is rejected") {
    CHECK_THROWS_AS(parse_topology("vm V host NOPE cores 1 ram 1024 ip 10.0.0.1\n"), SyntaxError);
    CHECK_THROWS_AS(parse_topology("device H host\n  interface e0\nvm V host H cores 1 ram 1024 ip 10.0.0.1\n"),
                    SyntaxError);
}

TEST_CASE("service on a missing vm or duplicated name is rejected") {
    CHECK_THROWS_AS(parse_topology("service NOPE svc db cpu_fixed 0.001 cpu_per_byte 0 footprint 0 resp fixed:1\n"),
                    SyntaxError);
    const char* dup =
        "device S server\n  cores 1\n  ram 1024\n  disk 100\n  interface e0\n    ip address 10.0.0.1 255.255.255.0\n"
        "vm V host S cores 1 ram 512 ip 10.0.0.2\n"
        "service V svc db cpu_fixed 0.001 cpu_per_byte 0 footprint 0 resp fixed:1\n"
        "service V svc db cpu_fixed 0.001 cpu_per_byte 0 footprint 0 resp fixed:1\n";
    CHECK_THROWS_AS(parse_topology(dup), SyntaxError);
}

TEST_CASE("db service needs positive cpu work") {
    CHECK_THROWS_AS(
        parse_topology("device S server\n  cores 1\n  ram 1024\n  disk 100\n  interface e0\n    ip address 10.0.0.1 255.255.255.0\n"
                       "vm V host S cores 1 ram 512 ip 10.0.0.2\n"
                       "service V svc db cpu_fixed 0 cpu_per_byte 0 footprint 0 resp fixed:1\n"),
        SyntaxError);
}

TEST_CASE("bad link parameters are rejected") {
    const char* base = "device A host\n  interface e0\ndevice B host\n  interface e0\n";
    CHECK_THROWS_AS(parse_topology(std::string(base) + "link A:e0 B:e0 bandwidth 0mbps delay 0s queue 8\n"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_topology(std::string(base) + "link A:e0 B:e0 bandwidth 1mbps delay 0s queue -1\n"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_topology(std::string(base) + "link A:e0 B:e0 bandwidth 1mbps queue 8\n"),
                    SyntaxError);
}

// ---------------------------------------------------------------------------
// emit
// ---------------------------------------------------------------------------

TEST_CASE("emit contains the dot1q native stanza") {
    auto text = emit_topology(bench());
    CHECK(text.find("encapsulation dot1q 100 native") != std::string::npos);
    CHECK(text.find("switchport trunk allowed vlan 100-102") != std::string::npos);
    CHECK(text.find("ip address 192.168.100.1 255.255.255.0") != std::string::npos);
}

TEST_CASE("parse(emit(doc)) is a fixpoint") {
    auto doc = bench();
    auto text = emit_topology(doc);
    auto doc2 = parse_topology(text);
    CHECK(doc2 == doc);
    CHECK(emit_topology(doc2) == text);
}

TEST_CASE("emit round-trips sparse vlan lists") {
    auto doc = parse_topology(R"(
device S switch
  interface f0/1
    switchport mode trunk
    switchport trunk allowed vlan 1,3,5-7,9
)");
    auto doc2 = parse_topology(emit_topology(doc));
    CHECK(doc2.devices[0].interfaces[0].allowed_vlans == std::set<int>{1, 3, 5, 6, 7, 9});
}

// ---------------------------------------------------------------------------
// build_network
// ---------------------------------------------------------------------------

TEST_CASE("bench model builds clean with three vlan domains and four subnets") {
    auto model = build_network(bench());
    CHECK(!model.has_errors());

    // every configured vlan becomes one broadcast domain spanning both sides
    // of the trunk
    const auto& domains = model.vlan_domains();
    REQUIRE(domains.size() == 3);
    REQUIRE(domains.count(100));
    REQUIRE(domains.count(101));
    REQUIRE(domains.count(102));
    const auto& d100 = domains.at(100);
    CHECK(d100.count({"R1", "FastEthernet0/1.100"}));
    CHECK(d100.count({"SW1", "FastEthernet0/2"}));

    const auto& subnets = model.subnets();
    REQUIRE(subnets.size() == 4);  // 10.0.0.0/24 + the three vlan subnets
    SubnetKey k100{*parse_ipv4("192.168.100.0"), 24};
    REQUIRE(subnets.count(k100));
    CHECK(subnets.at(k100).size() == 2);  // R1 subif, SRV_SUN eth0 (vm addrs bind, not listed)
}

TEST_CASE("endpoints in one vlan share a segment, different vlans do not") {
    auto model = build_network(bench());
    const auto* r100 = model.endpoint_of("R1", "FastEthernet0/1.100");
    const auto* r101 = model.endpoint_of("R1", "FastEthernet0/1.101");
    const auto* s100 = model.endpoint_of("SRV_SUN", "eth0");
    const auto* s101 = model.endpoint_of("SRV_SUN", "eth1");
    REQUIRE(r100);
    REQUIRE(r101);
    REQUIRE(s100);
    REQUIRE(s101);
    CHECK(r100->segment == s100->segment);
    CHECK(r101->segment == s101->segment);
    CHECK(r100->segment != r101->segment);
}

TEST_CASE("wild host port joins the untagged presentation") {
    auto model = build_network(bench());
    const auto* pc = model.endpoint_of("PC1", "eth0");
    const auto* r0 = model.endpoint_of("R1", "FastEthernet0/0");
    REQUIRE(pc);
    REQUIRE(r0);
    CHECK(pc->segment == r0->segment);
}

TEST_CASE("vm addresses resolve to a covering endpoint of the host") {
    auto model = build_network(bench());
    int db = model.vm_index("VM1_db");
    int fs = model.vm_index("VM1_file");
    REQUIRE(db >= 0);
    REQUIRE(fs >= 0);
    const auto* eth0 = model.endpoint_of("SRV_SUN", "eth0");
    const auto* eth1 = model.endpoint_of("SRV_SUN", "eth1");
    CHECK(model.vm_endpoint(db) == eth0->id);
    CHECK(model.vm_endpoint(fs) == eth1->id);

    const auto* owner = model.addr_owner(*parse_ipv4("192.168.100.10"));
    REQUIRE(owner);
    CHECK(owner->vm == "VM1_db");
    CHECK(owner->endpoint == eth0->id);
}

TEST_CASE("l2_next at the switch points at the learned egress") {
    auto model = build_network(bench());
    int sw = model.device_index("SW1");
    const auto* srv = model.endpoint_of("SRV_SUN", "eth0");
    REQUIRE(srv);
    auto hop = model.l2_next(sw, srv->id);
    REQUIRE(hop);
    const auto& link = model.link(hop->first);
    auto egress = hop->second == 0 ? link.a : link.b;
    CHECK(egress.device == "SW1");
    CHECK(egress.iface == "FastEthernet0/2");

    // and toward the router over the trunk
    const auto* r100 = model.endpoint_of("R1", "FastEthernet0/1.100");
    auto back = model.l2_next(sw, r100->id);
    REQUIRE(back);
    auto egress2 = back->second == 0 ? model.link(back->first).a : model.link(back->first).b;
    CHECK(egress2.iface == "FastEthernet0/1");
}

TEST_CASE("duplicate IP is a validation error") {
    auto doc = bench();
    // give PC1 the router's address
    for (auto& d : doc.devices)
        if (d.name == "PC1") d.interfaces[0].ip->address = *parse_ipv4("10.0.0.1");
    auto model = build_network(doc);
    CHECK(model.has_errors());
}

TEST_CASE("native vlan conflict on one carrier is a validation error") {
    auto doc = parse_topology(R"(
device R router
  interface f0/1
  interface f0/1.1
    encapsulation dot1q 1 native
    ip address 10.1.0.1 255.255.255.0
device Q router
  interface f0/1
  interface f0/1.2
    encapsulation dot1q 2 native
    ip address 10.2.0.1 255.255.255.0
link R:f0/1 Q:f0/1 bandwidth 1mbps delay 0s queue 8
)");
    auto model = build_network(doc);
    CHECK(model.has_errors());
}

TEST_CASE("vm overcommit is a validation error") {
    auto doc = bench();
    for (auto& vm : doc.vms)
        if (vm.name == "VM1_db") vm.alloc_cores = 4;  // 4 + 1 > 4 cores
    auto model = build_network(doc);
    CHECK(model.has_errors());
}

TEST_CASE("vm address outside every host subnet is a validation error") {
    auto doc = bench();
    for (auto& vm : doc.vms)
        if (vm.name == "VM1_db") vm.address = *parse_ipv4("172.31.0.10");
    auto model = build_network(doc);
    CHECK(model.has_errors());
}

TEST_CASE("unlinked physical interface is a warning, not an error") {
    auto doc = parse_topology("device A host\n  interface e0\n    ip address 10.0.0.1 255.255.255.0\n");
    auto model = build_network(doc);
    CHECK(!model.has_errors());
    CHECK(std::any_of(model.issues().begin(), model.issues().end(), [](const ValidationIssue& i) {
        return i.severity == ValidationIssue::Severity::Warning;
    }));
}

TEST_CASE("subinterface vlan missing from the trunk allowed set is flagged") {
    auto doc = parse_topology(R"(
device R router
  interface f0/1
  interface f0/1.50
    encapsulation dot1q 50
    ip address 10.50.0.1 255.255.255.0
device S switch
  interface f0/1
    switchport mode trunk
    switchport trunk allowed vlan 100
link R:f0/1 S:f0/1 bandwidth 1mbps delay 0s queue 8
)");
    auto model = build_network(doc);
    CHECK(std::any_of(model.issues().begin(), model.issues().end(), [](const ValidationIssue& i) {
        return i.message.find("50") != std::string::npos;
    }));
}

TEST_CASE("device and endpoint lookups") {
    auto model = build_network(bench());
    CHECK(model.device_index("R1") >= 0);
    CHECK(model.device_index("NOPE") == -1);
    CHECK(model.endpoint_of("R1", "FastEthernet0/1") == nullptr);  // parent holds no address
    const auto* dflt = model.default_endpoint("PC1");
    REQUIRE(dflt);
    CHECK(dflt->ip.address == *parse_ipv4("10.0.0.10"));
    CHECK(model.default_endpoint("SW1") == nullptr);
}

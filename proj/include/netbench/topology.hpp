#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "netbench/util.hpp"

namespace netbench {

// ---------------------------------------------------------------------------
// Configuration types (what the topology file describes)
// ---------------------------------------------------------------------------

enum class DeviceKind { Router, Switch, Server, Host };
enum class PortMode { Routed, Access, Trunk };

const char* device_kind_name(DeviceKind k);
const char* port_mode_name(PortMode m);

struct Dot1qEncap {
    int vlan_id = 0;
    bool native = false;
    bool operator==(const Dot1qEncap&) const = default;
};

struct IpConfig {
    uint32_t address = 0;
    int prefix_len = 0;
    bool operator==(const IpConfig&) const = default;
    uint32_t network() const { return network_of(address, prefix_len); }
};

struct InterfaceConfig {
    std::string name;
    PortMode mode = PortMode::Routed;
    std::optional<Dot1qEncap> encapsulation;
    std::optional<IpConfig> ip;
    std::set<int> allowed_vlans;      // trunk ports only
    std::optional<int> access_vlan;   // access ports only

    bool is_subinterface() const { return name.find('.') != std::string::npos; }
    std::string parent_name() const { return name.substr(0, name.find('.')); }
    bool operator==(const InterfaceConfig&) const = default;
};

/// Resource envelope of a physical server (present iff kind == Server).
struct ServerAttrs {
    int cores = 1;
    uint64_t ram_bytes = 0;
    uint64_t disk_bytes_per_s = 0;
    bool operator==(const ServerAttrs&) const = default;
};

struct DeviceConfig {
    std::string name;
    DeviceKind kind = DeviceKind::Host;
    std::vector<InterfaceConfig> interfaces;
    std::optional<ServerAttrs> server;

    const InterfaceConfig* find_interface(std::string_view iface) const;
    bool operator==(const DeviceConfig&) const = default;
};

enum class ServiceKind { Db, File };

struct ResponseRule {
    enum class Kind { Fixed, Multiplier } kind = Kind::Fixed;
    double value = 0;  // bytes for Fixed, factor for Multiplier
    bool operator==(const ResponseRule&) const = default;
    uint64_t response_bytes(uint64_t request_size) const;
};

struct ServiceConfig {
    std::string name;
    ServiceKind kind = ServiceKind::Db;
    double cpu_fixed_s = 0;       // core-seconds per request
    double cpu_per_byte_s = 0;    // core-seconds per response byte
    uint64_t ram_footprint = 0;   // bytes held per in-flight request
    ResponseRule response;
    bool operator==(const ServiceConfig&) const = default;
};

struct VmConfig {
    std::string name;
    std::string host;      // server device name
    int alloc_cores = 1;
    uint64_t alloc_ram = 0;
    uint32_t address = 0;
    std::vector<ServiceConfig> services;
    const ServiceConfig* find_service(std::string_view name) const;
    bool operator==(const VmConfig&) const = default;
};

/// Bandwidth as written in the file; kept symbolic so emit round-trips.
struct Rate {
    enum class Unit { Bps, Kbps, Mbps, Gbps } unit = Unit::Bps;
    double value = 0;
    double bps() const;
    std::string to_string() const;
    static std::optional<Rate> parse(std::string_view text);
    bool operator==(const Rate&) const = default;
};

struct Duration {
    enum class Unit { Us, Ms, S } unit = Unit::S;
    double value = 0;
    double seconds() const;
    std::string to_string() const;
    static std::optional<Duration> parse(std::string_view text);
    bool operator==(const Duration&) const = default;
};

struct LinkEndpoint {
    std::string device;
    std::string iface;  // physical interface
    bool operator==(const LinkEndpoint&) const = default;
    std::string to_string() const { return device + ":" + iface; }
};

struct LinkSpec {
    LinkEndpoint a;
    LinkEndpoint b;
    Rate bandwidth;
    Duration prop_delay;
    int queue_capacity = 0;  // packets, per direction per priority class
    bool operator==(const LinkSpec&) const = default;
};

struct TopologyDoc {
    std::vector<DeviceConfig> devices;
    std::vector<LinkSpec> links;
    std::vector<VmConfig> vms;

    const DeviceConfig* find_device(std::string_view name) const;
    const VmConfig* find_vm(std::string_view name) const;
    bool operator==(const TopologyDoc&) const = default;
};

// ---------------------------------------------------------------------------
// Parse / emit
// ---------------------------------------------------------------------------

/// Parses the line-oriented config dialect. Unknown keywords are errors.
/// Throws SyntaxError / DuplicateDeviceError / DanglingLinkEndpointError.
TopologyDoc parse_topology(std::string_view text);

/// Canonical text form; parse(emit(doc)) is structurally equal to doc.
std::string emit_topology(const TopologyDoc& doc);

// ---------------------------------------------------------------------------
// Validated network model
// ---------------------------------------------------------------------------

struct ValidationIssue {
    enum class Severity { Warning, Error };
    Severity severity = Severity::Warning;
    std::string message;
};

/// An L3 termination point: an addressed interface of a non-switch device.
struct EndpointInfo {
    int id = -1;
    int device = -1;            // index into doc().devices
    std::string iface;          // may be a subinterface
    std::string phys_iface;     // carrier port
    IpConfig ip;
    int attach_link = -1;       // index into doc().links, -1 if unlinked
    int attach_dir = -1;        // 0 = a->b when leaving this endpoint
    int segment = -1;           // broadcast segment id, -1 if none
};

struct AddrOwner {
    int endpoint = -1;
    std::string vm;  // empty when the address belongs to the interface itself
};

struct SubnetKey {
    uint32_t network = 0;
    int prefix_len = 0;
    auto operator<=>(const SubnetKey&) const = default;
    std::string to_string() const;
};

struct SubnetMember {
    std::string device;
    std::string iface;
    uint32_t address = 0;
};

class NetworkModel {
public:
    const TopologyDoc& doc() const { return doc_; }
    const std::vector<ValidationIssue>& issues() const { return issues_; }
    bool has_errors() const;

    const std::map<int, std::set<std::pair<std::string, std::string>>>& vlan_domains() const {
        return vlan_domains_;
    }
    const std::map<SubnetKey, std::vector<SubnetMember>>& subnets() const { return subnets_; }

    int device_index(std::string_view name) const;  // -1 if absent
    const DeviceConfig& device(int idx) const { return doc_.devices[idx]; }
    size_t device_count() const { return doc_.devices.size(); }
    size_t link_count() const { return doc_.links.size(); }
    const LinkSpec& link(int idx) const { return doc_.links[idx]; }

    const std::vector<EndpointInfo>& endpoints() const { return endpoints_; }
    const EndpointInfo* endpoint_of(std::string_view device, std::string_view iface) const;
    /// First addressed endpoint of a device, nullptr if it has none.
    const EndpointInfo* default_endpoint(std::string_view device) const;
    const AddrOwner* addr_owner(uint32_t addr) const;

    int vm_index(std::string_view name) const;  // index into doc().vms, -1 if absent
    /// Endpoint through which a VM's address is reachable.
    int vm_endpoint(int vm_idx) const { return vm_endpoint_[vm_idx]; }

    /// Egress for a switch forwarding toward `target_endpoint`:
    /// (link index, direction). nullopt when the target is not reachable
    /// through this switch at L2.
    std::optional<std::pair<int, int>> l2_next(int device_idx, int target_endpoint) const;

private:
    friend NetworkModel build_network(TopologyDoc doc);
    TopologyDoc doc_;
    std::vector<ValidationIssue> issues_;
    std::vector<EndpointInfo> endpoints_;
    std::map<std::string, int> device_index_;
    std::map<std::pair<std::string, std::string>, int> endpoint_index_;
    std::map<uint32_t, AddrOwner> addr_index_;
    std::map<int, std::set<std::pair<std::string, std::string>>> vlan_domains_;
    std::map<SubnetKey, std::vector<SubnetMember>> subnets_;
    std::vector<int> vm_endpoint_;
    std::map<std::pair<int, int>, std::pair<int, int>> l2_next_;  // (device, endpoint) -> (link, dir)
};

/// Builds indexes, broadcast domains, and L2 forwarding; records validation
/// issues on the returned model instead of throwing.
NetworkModel build_network(TopologyDoc doc);

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

struct Route {
    uint32_t prefix = 0;
    int prefix_len = 0;
    std::optional<uint32_t> next_hop;  // absent for connected routes
    std::string egress_interface;
    int metric = 0;
};

struct RoutingTable {
    std::vector<Route> routes;
};

/// Per-link view the route computation reads; lets the engine recompute
/// with control-plane overrides without rebuilding the model.
struct LinkView {
    std::function<double(int)> bandwidth_bps;
    std::function<bool(int)> up;
};

std::map<std::string, RoutingTable> compute_routes(const NetworkModel& model);
std::map<std::string, RoutingTable> compute_routes(const NetworkModel& model, const LinkView& view);

/// IOS-like SPF cost: round(1e8 / bandwidth_bps), minimum 1.
int link_metric(double bandwidth_bps);

struct NextHop {
    std::string egress_interface;
    std::optional<uint32_t> next_hop;  // absent -> directly connected
};

/// Longest-prefix match; ties by lowest metric then lowest next-hop address.
/// Unreachable is the empty optional, not an error.
std::optional<NextHop> resolve_next_hop(const RoutingTable& table, uint32_t dst);

std::string format_routing_table(const RoutingTable& table);

}  // namespace netbench

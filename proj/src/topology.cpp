#include "netbench/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <tuple>

#include "netbench/errors.hpp"

namespace netbench {

const char* device_kind_name(DeviceKind k) {
    switch (k) {
        case DeviceKind::Router: return "router";
        case DeviceKind::Switch: return "switch";
        case DeviceKind::Server: return "server";
        case DeviceKind::Host: return "host";
    }
    return "?";
}

const char* port_mode_name(PortMode m) {
    switch (m) {
        case PortMode::Routed: return "routed";
        case PortMode::Access: return "access";
        case PortMode::Trunk: return "trunk";
    }
    return "?";
}

static std::optional<DeviceKind> parse_device_kind(std::string_view s) {
    if (s == "router") return DeviceKind::Router;
    if (s == "switch") return DeviceKind::Switch;
    if (s == "server") return DeviceKind::Server;
    if (s == "host") return DeviceKind::Host;
    return std::nullopt;
}

const InterfaceConfig* DeviceConfig::find_interface(std::string_view iface) const {
    for (const auto& i : interfaces)
        if (i.name == iface) return &i;
    return nullptr;
}

const ServiceConfig* VmConfig::find_service(std::string_view sname) const {
    for (const auto& s : services)
        if (s.name == sname) return &s;
    return nullptr;
}

const DeviceConfig* TopologyDoc::find_device(std::string_view name) const {
    for (const auto& d : devices)
        if (d.name == name) return &d;
    return nullptr;
}

const VmConfig* TopologyDoc::find_vm(std::string_view name) const {
    for (const auto& v : vms)
        if (v.name == name) return &v;
    return nullptr;
}

uint64_t ResponseRule::response_bytes(uint64_t request_size) const {
    double bytes = kind == Kind::Fixed ? value : value * static_cast<double>(request_size);
    if (bytes <= 0) return 0;
    return static_cast<uint64_t>(std::llround(bytes));
}

// ---- units ----

double Rate::bps() const {
    switch (unit) {
        case Unit::Bps: return value;
        case Unit::Kbps: return value * 1e3;
        case Unit::Mbps: return value * 1e6;
        case Unit::Gbps: return value * 1e9;
    }
    return value;
}

std::string Rate::to_string() const {
    static const char* names[] = {"bps", "kbps", "mbps", "gbps"};
    return format_shortest(value) + names[static_cast<int>(unit)];
}

std::optional<Rate> Rate::parse(std::string_view text) {
    size_t i = 0;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
    auto num = parse_double(text.substr(0, i));
    if (!num) return std::nullopt;
    std::string suffix(text.substr(i));
    for (auto& c : suffix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    Rate r;
    r.value = *num;
    if (suffix == "bps") r.unit = Unit::Bps;
    else if (suffix == "kbps") r.unit = Unit::Kbps;
    else if (suffix == "mbps") r.unit = Unit::Mbps;
    else if (suffix == "gbps") r.unit = Unit::Gbps;
    else return std::nullopt;
    return r;
}

double Duration::seconds() const {
    switch (unit) {
        case Unit::Us: return value * 1e-6;
        case Unit::Ms: return value * 1e-3;
        case Unit::S: return value;
    }
    return value;
}

std::string Duration::to_string() const {
    static const char* names[] = {"us", "ms", "s"};
    return format_shortest(value) + names[static_cast<int>(unit)];
}

std::optional<Duration> Duration::parse(std::string_view text) {
    size_t i = 0;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
    auto num = parse_double(text.substr(0, i));
    if (!num) return std::nullopt;
    std::string suffix(text.substr(i));
    for (auto& c : suffix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    Duration d;
    d.value = *num;
    if (suffix == "us") d.unit = Unit::Us;
    else if (suffix == "ms") d.unit = Unit::Ms;
    else if (suffix == "s") d.unit = Unit::S;
    else return std::nullopt;
    return d;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct VlanList {
    std::set<int> ids;
};

std::optional<VlanList> parse_vlan_list(std::string_view text) {
    VlanList out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string_view part = (comma == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, comma - pos);
        size_t dash = part.find('-');
        if (dash == std::string_view::npos) {
            auto v = parse_i64(part);
            if (!v || *v < 1 || *v > 4094) return std::nullopt;
            out.ids.insert(static_cast<int>(*v));
        } else {
            auto lo = parse_i64(part.substr(0, dash));
            auto hi = parse_i64(part.substr(dash + 1));
            if (!lo || !hi || *lo < 1 || *hi > 4094 || *lo > *hi) return std::nullopt;
            for (int64_t v = *lo; v <= *hi; ++v) out.ids.insert(static_cast<int>(v));
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.ids.empty()) return std::nullopt;
    return out;
}

std::string emit_vlan_list(const std::set<int>& ids) {
    std::string out;
    auto it = ids.begin();
    while (it != ids.end()) {
        int lo = *it;
        int hi = lo;
        auto run = std::next(it);
        while (run != ids.end() && *run == hi + 1) {
            hi = *run;
            ++run;
        }
        if (!out.empty()) out += ',';
        out += std::to_string(lo);
        if (hi > lo) out += '-' + std::to_string(hi);
        it = run;
    }
    return out;
}

int parse_vlan_id(std::string_view text, int line) {
    auto v = parse_i64(text);
    if (!v || *v < 1 || *v > 4094)
        throw SyntaxError(line, "invalid vlan id '" + std::string(text) + "'");
    return static_cast<int>(*v);
}

}  // namespace

TopologyDoc parse_topology(std::string_view text) {
    TopologyDoc doc;
    DeviceConfig* cur_dev = nullptr;
    InterfaceConfig* cur_iface = nullptr;
    std::vector<int> device_lines;
    std::map<std::string, std::pair<int, int>> linked_ifaces;  // dev:iface -> line of link

    auto require_device = [&](int line, const char* kw) -> DeviceConfig& {
        if (!cur_dev) throw SyntaxError(line, std::string("'") + kw + "' outside a device block");
        return *cur_dev;
    };
    auto require_iface = [&](int line, const char* kw) -> InterfaceConfig& {
        require_device(line, kw);
        if (!cur_iface) throw SyntaxError(line, std::string("'") + kw + "' outside an interface block");
        return *cur_iface;
    };

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
        const std::string& kw = tok[0];

        if (kw == "device") {
            if (tok.size() != 3) throw SyntaxError(line_no, "expected: device <name> <kind>");
            auto kind = parse_device_kind(tok[2]);
            if (!kind) throw SyntaxError(line_no, "unknown device kind '" + tok[2] + "'");
            if (doc.find_device(tok[1])) throw DuplicateDeviceError(line_no, tok[1]);
            doc.devices.push_back(DeviceConfig{tok[1], *kind, {}, {}});
            if (*kind == DeviceKind::Server) doc.devices.back().server = ServerAttrs{0, 0, 0};
            device_lines.push_back(line_no);
            cur_dev = &doc.devices.back();
            cur_iface = nullptr;
        } else if (kw == "interface") {
            auto& dev = require_device(line_no, "interface");
            if (tok.size() != 2) throw SyntaxError(line_no, "expected: interface <name>");
            if (dev.find_interface(tok[1]))
                throw SyntaxError(line_no, "duplicate interface '" + tok[1] + "'");
            InterfaceConfig iface;
            iface.name = tok[1];
            if (iface.is_subinterface()) {
                if (dev.kind != DeviceKind::Router)
                    throw SyntaxError(line_no, "subinterfaces are only valid on routers");
                if (std::count(iface.name.begin(), iface.name.end(), '.') != 1)
                    throw SyntaxError(line_no, "subinterface name must contain exactly one '.'");
                if (!dev.find_interface(iface.parent_name()))
                    throw SyntaxError(line_no, "parent interface '" + iface.parent_name() +
                                                   "' not declared before '" + iface.name + "'");
            }
            if (dev.kind == DeviceKind::Switch) {
                iface.mode = PortMode::Access;
                iface.access_vlan = 1;
            }
            dev.interfaces.push_back(std::move(iface));
            cur_iface = &dev.interfaces.back();
        } else if (kw == "encapsulation") {
            auto& iface = require_iface(line_no, "encapsulation");
            if (tok.size() < 3 || tok.size() > 4 || tok[1] != "dot1q")
                throw SyntaxError(line_no, "expected: encapsulation dot1q <id> [native]");
            if (cur_dev->kind != DeviceKind::Router)
                throw SyntaxError(line_no, "encapsulation is only valid on router subinterfaces");
            if (!iface.is_subinterface())
                throw SyntaxError(line_no, "encapsulation requires a subinterface");
            Dot1qEncap enc;
            enc.vlan_id = parse_vlan_id(tok[2], line_no);
            if (tok.size() == 4) {
                if (tok[3] != "native") throw SyntaxError(line_no, "unexpected token '" + tok[3] + "'");
                for (const auto& other : cur_dev->interfaces)
                    if (other.name != iface.name && other.is_subinterface() &&
                        other.parent_name() == iface.parent_name() && other.encapsulation &&
                        other.encapsulation->native)
                        throw SyntaxError(line_no, "parent " + iface.parent_name() +
                                                       " already has a native subinterface ('" +
                                                       other.name + "')");
                enc.native = true;
            }
            if (iface.encapsulation) throw SyntaxError(line_no, "encapsulation already set");
            iface.encapsulation = enc;
        } else if (kw == "ip") {
            auto& iface = require_iface(line_no, "ip");
            if (tok.size() != 4 || tok[1] != "address")
                throw SyntaxError(line_no, "expected: ip address <a.b.c.d> <mask>");
            auto addr = parse_ipv4(tok[2]);
            if (!addr) throw SyntaxError(line_no, "invalid address '" + tok[2] + "'");
            auto mask = parse_ipv4(tok[3]);
            if (!mask) throw SyntaxError(line_no, "invalid netmask '" + tok[3] + "'");
            auto prefix = mask_to_prefix(*mask);
            if (!prefix) throw SyntaxError(line_no, "non-contiguous netmask '" + tok[3] + "'");
            if (iface.ip) throw SyntaxError(line_no, "ip address already set");
            iface.ip = IpConfig{*addr, *prefix};
        } else if (kw == "switchport") {
            auto& iface = require_iface(line_no, "switchport");
            if (cur_dev->kind != DeviceKind::Switch)
                throw SyntaxError(line_no, "switchport is only valid on switches");
            if (tok.size() == 3 && tok[1] == "mode") {
                if (tok[2] == "trunk") {
                    iface.mode = PortMode::Trunk;
                    iface.access_vlan.reset();
                } else if (tok[2] == "access") {
                    iface.mode = PortMode::Access;
                    if (!iface.access_vlan) iface.access_vlan = 1;
                } else {
                    throw SyntaxError(line_no, "expected: switchport mode <trunk|access>");
                }
            } else if (tok.size() == 5 && tok[1] == "trunk" && tok[2] == "allowed" && tok[3] == "vlan") {
                auto list = parse_vlan_list(tok[4]);
                if (!list) throw SyntaxError(line_no, "invalid vlan list '" + tok[4] + "'");
                iface.allowed_vlans = std::move(list->ids);
            } else if (tok.size() == 4 && tok[1] == "access" && tok[2] == "vlan") {
                iface.access_vlan = parse_vlan_id(tok[3], line_no);
            } else {
                throw SyntaxError(line_no, "unrecognized switchport form");
            }
        } else if (kw == "cores" || kw == "ram" || kw == "disk") {
            auto& dev = require_device(line_no, kw.c_str());
            if (dev.kind != DeviceKind::Server)
                throw SyntaxError(line_no, "'" + kw + "' is only valid in a server block");
            if (tok.size() != 2) throw SyntaxError(line_no, "expected: " + kw + " <n>");
            auto v = parse_u64(tok[1]);
            if (!v || *v == 0) throw SyntaxError(line_no, "'" + kw + "' must be a positive integer");
            if (kw == "cores") dev.server->cores = static_cast<int>(*v);
            else if (kw == "ram") dev.server->ram_bytes = *v;
            else dev.server->disk_bytes_per_s = *v;
        } else if (kw == "vm") {
            cur_dev = nullptr;
            cur_iface = nullptr;
            if (tok.size() != 10 || tok[2] != "host" || tok[4] != "cores" || tok[6] != "ram" ||
                tok[8] != "ip")
                throw SyntaxError(line_no,
                                  "expected: vm <name> host <server> cores <n> ram <bytes> ip <addr>");
            if (doc.find_vm(tok[1])) throw SyntaxError(line_no, "duplicate vm '" + tok[1] + "'");
            VmConfig vm;
            vm.name = tok[1];
            vm.host = tok[3];
            auto cores = parse_u64(tok[5]);
            if (!cores || *cores == 0) throw SyntaxError(line_no, "vm cores must be >= 1");
            vm.alloc_cores = static_cast<int>(*cores);
            auto ram = parse_u64(tok[7]);
            if (!ram || *ram == 0) throw SyntaxError(line_no, "vm ram must be positive");
            vm.alloc_ram = *ram;
            auto addr = parse_ipv4(tok[9]);
            if (!addr) throw SyntaxError(line_no, "invalid vm address '" + tok[9] + "'");
            vm.address = *addr;
            const DeviceConfig* host = doc.find_device(vm.host);
            if (!host) throw SyntaxError(line_no, "vm host '" + vm.host + "' does not exist");
            if (host->kind != DeviceKind::Server)
                throw SyntaxError(line_no, "vm host '" + vm.host + "' is not a server");
            doc.vms.push_back(std::move(vm));
        } else if (kw == "service") {
            cur_dev = nullptr;
            cur_iface = nullptr;
            if (tok.size() != 12 || tok[4] != "cpu_fixed" || tok[6] != "cpu_per_byte" ||
                tok[8] != "footprint" || tok[10] != "resp")
                throw SyntaxError(line_no,
                                  "expected: service <vm> <name> <db|file> cpu_fixed <s> "
                                  "cpu_per_byte <s> footprint <bytes> resp <fixed:N|mult:X>");
            VmConfig* vm = nullptr;
            for (auto& v : doc.vms)
                if (v.name == tok[1]) vm = &v;
            if (!vm) throw SyntaxError(line_no, "service references unknown vm '" + tok[1] + "'");
            ServiceConfig svc;
            svc.name = tok[2];
            if (vm->find_service(svc.name))
                throw SyntaxError(line_no, "duplicate service '" + svc.name + "' on vm '" + tok[1] + "'");
            if (tok[3] == "db") svc.kind = ServiceKind::Db;
            else if (tok[3] == "file") svc.kind = ServiceKind::File;
            else throw SyntaxError(line_no, "service kind must be db or file");
            auto cpu_fixed = parse_double(tok[5]);
            auto cpu_per_byte = parse_double(tok[7]);
            auto footprint = parse_u64(tok[9]);
            if (!cpu_fixed || *cpu_fixed < 0) throw SyntaxError(line_no, "invalid cpu_fixed");
            if (!cpu_per_byte || *cpu_per_byte < 0) throw SyntaxError(line_no, "invalid cpu_per_byte");
            if (!footprint) throw SyntaxError(line_no, "invalid footprint");
            svc.cpu_fixed_s = *cpu_fixed;
            svc.cpu_per_byte_s = *cpu_per_byte;
            svc.ram_footprint = *footprint;
            if (svc.kind == ServiceKind::Db && svc.cpu_fixed_s == 0 && svc.cpu_per_byte_s == 0)
                throw SyntaxError(line_no, "db service needs cpu_fixed or cpu_per_byte > 0");
            std::string resp = tok[11];
            size_t colon = resp.find(':');
            if (colon == std::string::npos)
                throw SyntaxError(line_no, "resp must be fixed:<bytes> or mult:<x>");
            std::string rk = resp.substr(0, colon);
            auto rv = parse_double(resp.substr(colon + 1));
            if (!rv || *rv < 0) throw SyntaxError(line_no, "invalid resp value");
            if (rk == "fixed") svc.response = ResponseRule{ResponseRule::Kind::Fixed, *rv};
            else if (rk == "mult") svc.response = ResponseRule{ResponseRule::Kind::Multiplier, *rv};
            else throw SyntaxError(line_no, "resp must be fixed:<bytes> or mult:<x>");
            vm->services.push_back(std::move(svc));
        } else if (kw == "link") {
            cur_dev = nullptr;
            cur_iface = nullptr;
            if (tok.size() != 9 || tok[3] != "bandwidth" || tok[5] != "delay" || tok[7] != "queue")
                throw SyntaxError(line_no,
                                  "expected: link <dev>:<iface> <dev>:<iface> bandwidth <r> "
                                  "delay <d> queue <n>");
            LinkSpec link;
            for (int side = 0; side < 2; ++side) {
                const std::string& spec = tok[1 + side];
                size_t colon = spec.find(':');
                if (colon == std::string::npos || spec.find(':', colon + 1) != std::string::npos)
                    throw SyntaxError(line_no, "link endpoint must be <device>:<interface>");
                LinkEndpoint ep{spec.substr(0, colon), spec.substr(colon + 1)};
                const DeviceConfig* dev = doc.find_device(ep.device);
                if (!dev) throw DanglingLinkEndpointError(line_no, spec);
                const InterfaceConfig* ifc = dev->find_interface(ep.iface);
                if (!ifc) throw DanglingLinkEndpointError(line_no, spec);
                if (ifc->is_subinterface())
                    throw SyntaxError(line_no, "link endpoint must be a physical interface");
                auto [it, inserted] = linked_ifaces.emplace(spec, std::make_pair(line_no, 0));
                if (!inserted)
                    throw SyntaxError(line_no, "interface " + spec + " already used by the link on line " +
                                                   std::to_string(it->second.first));
                (side == 0 ? link.a : link.b) = ep;
            }
            auto rate = Rate::parse(tok[4]);
            if (!rate || rate->bps() <= 0) throw SyntaxError(line_no, "invalid bandwidth '" + tok[4] + "'");
            link.bandwidth = *rate;
            auto delay = Duration::parse(tok[6]);
            if (!delay || delay->seconds() < 0) throw SyntaxError(line_no, "invalid delay '" + tok[6] + "'");
            link.prop_delay = *delay;
            auto queue = parse_i64(tok[8]);
            if (!queue || *queue < 0) throw SyntaxError(line_no, "invalid queue capacity '" + tok[8] + "'");
            link.queue_capacity = static_cast<int>(*queue);
            doc.links.push_back(std::move(link));
        } else {
            throw SyntaxError(line_no, "unknown keyword '" + kw + "'");
        }
    }

    // Block-level invariants that need the whole document.
    for (size_t di = 0; di < doc.devices.size(); ++di) {
        const auto& dev = doc.devices[di];
        for (const auto& iface : dev.interfaces) {
            if (iface.is_subinterface() && !iface.encapsulation)
                throw SyntaxError(device_lines[di], "subinterface '" + dev.name + ":" + iface.name +
                                                        "' has no encapsulation");
            if (iface.mode == PortMode::Trunk && iface.allowed_vlans.empty())
                throw SyntaxError(device_lines[di], "trunk '" + dev.name + ":" + iface.name +
                                                        "' has no allowed vlan list");
            if (iface.mode != PortMode::Trunk && !iface.allowed_vlans.empty())
                throw SyntaxError(device_lines[di], "allowed vlan list on non-trunk '" + dev.name + ":" +
                                                        iface.name + "'");
            if (!iface.is_subinterface() && iface.ip) {
                // A parent that fans out into subinterfaces carries tagged frames only.
                bool has_subifs = false;
                for (const auto& other : dev.interfaces)
                    if (other.is_subinterface() && other.parent_name() == iface.name) has_subifs = true;
                if (has_subifs)
                    throw SyntaxError(device_lines[di], "interface '" + dev.name + ":" + iface.name +
                                                            "' has both an address and subinterfaces");
            }
        }
        if (dev.kind == DeviceKind::Server &&
            (dev.server->cores == 0 || dev.server->ram_bytes == 0 || dev.server->disk_bytes_per_s == 0))
            throw SyntaxError(device_lines[di],
                              "server '" + dev.name + "' needs cores, ram and disk declarations");
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Emitter
// ---------------------------------------------------------------------------

std::string emit_topology(const TopologyDoc& doc) {
    std::ostringstream out;
    bool first = true;
    for (const auto& dev : doc.devices) {
        if (!first) out << "\n";
        first = false;
        out << "device " << dev.name << " " << device_kind_name(dev.kind) << "\n";
        if (dev.server) {
            out << "  cores " << dev.server->cores << "\n";
            out << "  ram " << dev.server->ram_bytes << "\n";
            out << "  disk " << dev.server->disk_bytes_per_s << "\n";
        }
        for (const auto& iface : dev.interfaces) {
            out << "  interface " << iface.name << "\n";
            if (iface.encapsulation) {
                out << "    encapsulation dot1q " << iface.encapsulation->vlan_id;
                if (iface.encapsulation->native) out << " native";
                out << "\n";
            }
            if (iface.ip)
                out << "    ip address " << format_ipv4(iface.ip->address) << " "
                    << format_ipv4(prefix_to_mask(iface.ip->prefix_len)) << "\n";
            if (dev.kind == DeviceKind::Switch) {
                out << "    switchport mode " << port_mode_name(iface.mode) << "\n";
                if (iface.mode == PortMode::Trunk)
                    out << "    switchport trunk allowed vlan " << emit_vlan_list(iface.allowed_vlans)
                        << "\n";
                else if (iface.access_vlan)
                    out << "    switchport access vlan " << *iface.access_vlan << "\n";
            }
        }
    }
    if (!doc.vms.empty()) out << "\n";
    for (const auto& vm : doc.vms)
        out << "vm " << vm.name << " host " << vm.host << " cores " << vm.alloc_cores << " ram "
            << vm.alloc_ram << " ip " << format_ipv4(vm.address) << "\n";
    bool any_service = false;
    for (const auto& vm : doc.vms)
        for (const auto& svc : vm.services) {
            if (!any_service) out << "\n";
            any_service = true;
            out << "service " << vm.name << " " << svc.name << " "
                << (svc.kind == ServiceKind::Db ? "db" : "file") << " cpu_fixed "
                << format_shortest(svc.cpu_fixed_s) << " cpu_per_byte "
                << format_shortest(svc.cpu_per_byte_s) << " footprint " << svc.ram_footprint
                << " resp "
                << (svc.response.kind == ResponseRule::Kind::Fixed ? "fixed:" : "mult:")
                << format_shortest(svc.response.value) << "\n";
        }
    if (!doc.links.empty()) out << "\n";
    for (const auto& link : doc.links)
        out << "link " << link.a.to_string() << " " << link.b.to_string() << " bandwidth "
            << link.bandwidth.to_string() << " delay " << link.prop_delay.to_string() << " queue "
            << link.queue_capacity << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Model build
// ---------------------------------------------------------------------------

std::string SubnetKey::to_string() const {
    return format_ipv4(network) + "/" + std::to_string(prefix_len);
}

bool NetworkModel::has_errors() const {
    for (const auto& issue : issues_)
        if (issue.severity == ValidationIssue::Severity::Error) return true;
    return false;
}

int NetworkModel::device_index(std::string_view name) const {
    auto it = device_index_.find(std::string(name));
    return it == device_index_.end() ? -1 : it->second;
}

const EndpointInfo* NetworkModel::endpoint_of(std::string_view device, std::string_view iface) const {
    auto it = endpoint_index_.find({std::string(device), std::string(iface)});
    return it == endpoint_index_.end() ? nullptr : &endpoints_[it->second];
}

const EndpointInfo* NetworkModel::default_endpoint(std::string_view device) const {
    for (const auto& ep : endpoints_)
        if (doc_.devices[ep.device].name == device) return &ep;
    return nullptr;
}

const AddrOwner* NetworkModel::addr_owner(uint32_t addr) const {
    auto it = addr_index_.find(addr);
    return it == addr_index_.end() ? nullptr : &it->second;
}

int NetworkModel::vm_index(std::string_view name) const {
    for (size_t i = 0; i < doc_.vms.size(); ++i)
        if (doc_.vms[i].name == name) return static_cast<int>(i);
    return -1;
}

std::optional<std::pair<int, int>> NetworkModel::l2_next(int device_idx, int target_endpoint) const {
    auto it = l2_next_.find({device_idx, target_endpoint});
    if (it == l2_next_.end()) return std::nullopt;
    return it->second;
}

namespace {

// L2 graph vertex: a switch collapses to one vertex per vlan context;
// every other port is its own vertex per context (-1 = untagged).
struct L2Vertex {
    int device = -1;
    std::string port;  // empty for switch vertices
    int vlan = -1;
    auto operator<=>(const L2Vertex&) const = default;
};

struct L2Edge {
    int link = -1;
    int out_dir = -1;  // direction when leaving `from`
    L2Vertex from, to;
};

enum class Presentation { None, Tagged, Untagged, Wild };

}  // namespace

NetworkModel build_network(TopologyDoc doc) {
    NetworkModel m;
    m.doc_ = std::move(doc);
    const TopologyDoc& d = m.doc_;
    auto issue = [&](ValidationIssue::Severity sev, std::string msg) {
        m.issues_.push_back({sev, std::move(msg)});
    };
    using Sev = ValidationIssue::Severity;

    for (size_t i = 0; i < d.devices.size(); ++i)
        m.device_index_[d.devices[i].name] = static_cast<int>(i);

    // Link attachment per physical port.
    std::map<std::pair<std::string, std::string>, std::pair<int, int>> attach;
    for (size_t li = 0; li < d.links.size(); ++li) {
        attach[{d.links[li].a.device, d.links[li].a.iface}] = {static_cast<int>(li), 0};
        attach[{d.links[li].b.device, d.links[li].b.iface}] = {static_cast<int>(li), 1};
    }

    // Endpoints: addressed interfaces of non-switch devices.
    for (size_t di = 0; di < d.devices.size(); ++di) {
        const auto& dev = d.devices[di];
        if (dev.kind == DeviceKind::Switch) continue;
        for (const auto& iface : dev.interfaces) {
            if (!iface.ip) continue;
            EndpointInfo ep;
            ep.id = static_cast<int>(m.endpoints_.size());
            ep.device = static_cast<int>(di);
            ep.iface = iface.name;
            ep.phys_iface = iface.parent_name();
            ep.ip = *iface.ip;
            auto at = attach.find({dev.name, ep.phys_iface});
            if (at != attach.end()) {
                ep.attach_link = at->second.first;
                ep.attach_dir = at->second.second;
            }
            m.endpoint_index_[{dev.name, iface.name}] = ep.id;
            m.endpoints_.push_back(std::move(ep));
        }
    }

    // Address index; exact duplicates are configuration errors.
    auto claim_addr = [&](uint32_t addr, AddrOwner owner, const std::string& what) {
        auto [it, inserted] = m.addr_index_.emplace(addr, owner);
        if (!inserted) {
            const auto& prev = m.endpoints_[it->second.endpoint];
            issue(Sev::Error, "duplicate IP address " + format_ipv4(addr) + ": " + what + " and " +
                                  d.devices[prev.device].name + ":" + prev.iface +
                                  (it->second.vm.empty() ? "" : " (vm " + it->second.vm + ")"));
        }
    };
    for (const auto& ep : m.endpoints_)
        claim_addr(ep.ip.address, {ep.id, ""}, d.devices[ep.device].name + ":" + ep.iface);

    // VMs: bind each to the host endpoint whose prefix covers its address.
    m.vm_endpoint_.assign(d.vms.size(), -1);
    for (size_t vi = 0; vi < d.vms.size(); ++vi) {
        const auto& vm = d.vms[vi];
        int host_idx = m.device_index(vm.host);
        for (const auto& ep : m.endpoints_) {
            if (ep.device != host_idx) continue;
            if (network_of(vm.address, ep.ip.prefix_len) == ep.ip.network()) {
                m.vm_endpoint_[vi] = ep.id;
                break;
            }
        }
        if (m.vm_endpoint_[vi] < 0)
            issue(Sev::Error, "vm " + vm.name + " address " + format_ipv4(vm.address) +
                                  " is not covered by any subnet of host " + vm.host);
        else
            claim_addr(vm.address, {m.vm_endpoint_[vi], vm.name}, "vm " + vm.name);
    }

    // Server capacity sums.
    for (size_t di = 0; di < d.devices.size(); ++di) {
        const auto& dev = d.devices[di];
        if (dev.kind != DeviceKind::Server) continue;
        int cores = 0;
        uint64_t ram = 0;
        for (const auto& vm : d.vms)
            if (vm.host == dev.name) {
                cores += vm.alloc_cores;
                ram += vm.alloc_ram;
            }
        if (cores > dev.server->cores)
            issue(Sev::Error, "server " + dev.name + " over-allocated: " + std::to_string(cores) +
                                  " vm cores > " + std::to_string(dev.server->cores));
        if (ram > dev.server->ram_bytes)
            issue(Sev::Error, "server " + dev.name + " over-allocated: " + std::to_string(ram) +
                                  " vm ram bytes > " + std::to_string(dev.server->ram_bytes));
    }

    // Native-vlan conflicts: at most one native subinterface per parent.
    for (const auto& dev : d.devices) {
        std::map<std::string, std::vector<const InterfaceConfig*>> natives;
        for (const auto& iface : dev.interfaces)
            if (iface.encapsulation && iface.encapsulation->native)
                natives[iface.parent_name()].push_back(&iface);
        for (const auto& [parent, list] : natives)
            if (list.size() > 1)
                issue(Sev::Error, "native vlan conflict on " + dev.name + ":" + parent + ": " +
                                      std::to_string(list.size()) + " native subinterfaces");
    }

    // Native-vlan conflicts across a wire: both ends may not map untagged frames
    // to different vlans.
    auto untagged_vlan = [&](const DeviceConfig& dev, const std::string& port) -> std::optional<int> {
        if (dev.kind == DeviceKind::Switch) {
            const InterfaceConfig* ifc = dev.find_interface(port);
            if (ifc && ifc->mode == PortMode::Access && ifc->access_vlan) return *ifc->access_vlan;
            return std::nullopt;
        }
        for (const auto& ifc : dev.interfaces)
            if (ifc.is_subinterface() && ifc.parent_name() == port && ifc.encapsulation &&
                ifc.encapsulation->native)
                return ifc.encapsulation->vlan_id;
        return std::nullopt;
    };
    for (const auto& link : d.links) {
        const auto& deva = d.devices[m.device_index(link.a.device)];
        const auto& devb = d.devices[m.device_index(link.b.device)];
        auto na = untagged_vlan(deva, link.a.iface);
        auto nb = untagged_vlan(devb, link.b.iface);
        if (na && nb && *na != *nb)
            issue(Sev::Error, "native vlan conflict on link " + link.a.device + ":" + link.a.iface +
                                  " -- " + link.b.device + ":" + link.b.iface + ": vlan " +
                                  std::to_string(*na) + " vs " + std::to_string(*nb));
    }

    // Port presentation for a vlan on a wire.
    auto classify = [&](const DeviceConfig& dev, const std::string& port, int vlan) -> Presentation {
        if (dev.kind == DeviceKind::Switch) {
            const InterfaceConfig* ifc = dev.find_interface(port);
            if (!ifc) return Presentation::None;
            if (ifc->mode == PortMode::Trunk)
                return ifc->allowed_vlans.count(vlan) ? Presentation::Tagged : Presentation::None;
            return (ifc->access_vlan && *ifc->access_vlan == vlan) ? Presentation::Untagged
                                                                   : Presentation::None;
        }
        bool has_subifs = false;
        for (const auto& ifc : dev.interfaces) {
            if (!ifc.is_subinterface() || ifc.parent_name() != port) continue;
            has_subifs = true;
            if (ifc.encapsulation && ifc.encapsulation->vlan_id == vlan)
                return ifc.encapsulation->native ? Presentation::Untagged : Presentation::Tagged;
        }
        return has_subifs ? Presentation::None : Presentation::Wild;
    };
    auto carried_vlans = [&](const DeviceConfig& dev, const std::string& port) -> std::set<int> {
        std::set<int> out;
        if (dev.kind == DeviceKind::Switch) {
            const InterfaceConfig* ifc = dev.find_interface(port);
            if (!ifc) return out;
            if (ifc->mode == PortMode::Trunk) return ifc->allowed_vlans;
            if (ifc->access_vlan) out.insert(*ifc->access_vlan);
            return out;
        }
        for (const auto& ifc : dev.interfaces)
            if (ifc.is_subinterface() && ifc.parent_name() == port && ifc.encapsulation)
                out.insert(ifc.encapsulation->vlan_id);
        return out;
    };

    // L2 graph.
    std::map<L2Vertex, std::vector<L2Edge>> adjacency;
    auto vertex_for = [&](int dev_idx, const std::string& port, int vlan) -> L2Vertex {
        if (d.devices[dev_idx].kind == DeviceKind::Switch) return {dev_idx, "", vlan};
        return {dev_idx, port, vlan};
    };
    auto add_edge = [&](int link, const L2Vertex& va, const L2Vertex& vb) {
        adjacency[va].push_back({link, 0, va, vb});
        adjacency[vb].push_back({link, 1, vb, va});
    };
    std::set<std::pair<int, std::pair<std::string, std::string>>> vlan_member_ports;  // reporting

    for (size_t li = 0; li < d.links.size(); ++li) {
        const auto& link = d.links[li];
        int da = m.device_index(link.a.device);
        int db = m.device_index(link.b.device);
        const auto& deva = d.devices[da];
        const auto& devb = d.devices[db];
        std::set<int> vlans = carried_vlans(deva, link.a.iface);
        for (int v : carried_vlans(devb, link.b.iface)) vlans.insert(v);
        for (int v : vlans) {
            Presentation pa = classify(deva, link.a.iface, v);
            Presentation pb = classify(devb, link.b.iface, v);
            bool a_real = pa == Presentation::Tagged || pa == Presentation::Untagged;
            bool b_real = pb == Presentation::Tagged || pb == Presentation::Untagged;
            L2Vertex va, vb;
            if (a_real && b_real) {
                va = vertex_for(da, link.a.iface, v);
                vb = vertex_for(db, link.b.iface, v);
            } else if (a_real && pb == Presentation::Wild && pa == Presentation::Untagged) {
                va = vertex_for(da, link.a.iface, v);
                vb = vertex_for(db, link.b.iface, -1);
            } else if (b_real && pa == Presentation::Wild && pb == Presentation::Untagged) {
                va = vertex_for(da, link.a.iface, -1);
                vb = vertex_for(db, link.b.iface, v);
            } else {
                continue;
            }
            add_edge(static_cast<int>(li), va, vb);
            vlan_member_ports.insert({v, {deva.name, link.a.iface}});
            vlan_member_ports.insert({v, {devb.name, link.b.iface}});
        }
        // Untagged point-to-point between two plain ports.
        if (classify(deva, link.a.iface, 0) == Presentation::Wild &&
            classify(devb, link.b.iface, 0) == Presentation::Wild)
            add_edge(static_cast<int>(li), vertex_for(da, link.a.iface, -1),
                     vertex_for(db, link.b.iface, -1));
    }
    for (auto& [v, edges] : adjacency)
        std::sort(edges.begin(), edges.end(),
                  [](const L2Edge& x, const L2Edge& y) { return x.link < y.link; });

    // VLAN domains for reporting: configured carriers plus joined plain ports.
    for (const auto& dev : d.devices) {
        for (const auto& iface : dev.interfaces) {
            if (dev.kind == DeviceKind::Switch) {
                if (iface.mode == PortMode::Trunk)
                    for (int v : iface.allowed_vlans) m.vlan_domains_[v].insert({dev.name, iface.name});
                else if (iface.access_vlan)
                    m.vlan_domains_[*iface.access_vlan].insert({dev.name, iface.name});
            } else if (iface.encapsulation) {
                m.vlan_domains_[iface.encapsulation->vlan_id].insert({dev.name, iface.name});
            }
        }
    }
    for (const auto& [v, port] : vlan_member_ports) {
        int di = m.device_index(port.first);
        if (d.devices[di].kind == DeviceKind::Switch) continue;
        bool plain = classify(d.devices[di], port.second, v) == Presentation::Wild;
        if (plain) m.vlan_domains_[v].insert(port);
    }

    // Segment ids via union-find over vertices.
    std::map<L2Vertex, L2Vertex> parent;
    std::function<L2Vertex(L2Vertex)> find = [&](L2Vertex v) {
        auto it = parent.find(v);
        if (it == parent.end() || it->second == v) return v;
        L2Vertex root = find(it->second);
        parent[v] = root;
        return root;
    };
    for (const auto& [v, edges] : adjacency) {
        parent.emplace(v, v);
        for (const auto& e : edges) {
            parent.emplace(e.to, e.to);
            L2Vertex ra = find(v), rb = find(e.to);
            if (!(ra == rb)) parent[ra] = rb;
        }
    }
    std::map<L2Vertex, int> segment_id;
    auto endpoint_vertex = [&](const EndpointInfo& ep) -> L2Vertex {
        const auto& iface = *d.devices[ep.device].find_interface(ep.iface);
        int ctx = iface.encapsulation ? iface.encapsulation->vlan_id : -1;
        return {ep.device, ep.phys_iface, ctx};
    };
    for (auto& ep : m.endpoints_) {
        L2Vertex v = endpoint_vertex(ep);
        if (!adjacency.count(v)) continue;  // unlinked or no compatible peer
        L2Vertex root = find(v);
        auto [it, inserted] = segment_id.emplace(root, static_cast<int>(segment_id.size()));
        ep.segment = it->second;
    }

    // Per-endpoint BFS gives every switch its egress toward that endpoint.
    for (const auto& ep : m.endpoints_) {
        if (ep.segment < 0) continue;
        L2Vertex start = endpoint_vertex(ep);
        std::map<L2Vertex, bool> seen;
        std::deque<L2Vertex> frontier{start};
        seen[start] = true;
        while (!frontier.empty()) {
            L2Vertex u = frontier.front();
            frontier.pop_front();
            for (const auto& e : adjacency[u]) {
                if (seen.count(e.to)) continue;
                seen[e.to] = true;
                if (d.devices[e.to.device].kind == DeviceKind::Switch) {
                    // Toward the endpoint means back across the discovering edge.
                    m.l2_next_.emplace(std::make_pair(e.to.device, ep.id),
                                       std::make_pair(e.link, 1 - e.out_dir));
                }
                frontier.push_back(e.to);
            }
        }
    }

    // Subnets.
    {
        std::map<SubnetKey, std::vector<SubnetMember>> groups;
        for (const auto& ep : m.endpoints_)
            groups[{ep.ip.network(), ep.ip.prefix_len}].push_back(
                {d.devices[ep.device].name, ep.iface, ep.ip.address});
        for (auto& [key, members] : groups)
            std::sort(members.begin(), members.end(), [](const SubnetMember& x, const SubnetMember& y) {
                return std::tie(x.device, x.iface) < std::tie(y.device, y.iface);
            });
        m.subnets_ = std::move(groups);
    }

    // Remaining validation: unlinked interfaces, unreachable subinterface vlans.
    for (const auto& dev : d.devices)
        for (const auto& iface : dev.interfaces) {
            if (iface.is_subinterface()) continue;
            if (!attach.count({dev.name, iface.name}))
                issue(Sev::Warning, "interface " + dev.name + ":" + iface.name + " is in no link");
        }
    for (const auto& ep : m.endpoints_) {
        const auto& iface = *d.devices[ep.device].find_interface(ep.iface);
        if (!iface.encapsulation || ep.attach_link < 0) continue;
        const auto& link = d.links[ep.attach_link];
        const auto& peer = ep.attach_dir == 0 ? link.b : link.a;
        const DeviceConfig* peer_dev = d.find_device(peer.device);
        const InterfaceConfig* peer_ifc = peer_dev->find_interface(peer.iface);
        if (peer_dev->kind == DeviceKind::Switch && peer_ifc->mode == PortMode::Trunk &&
            !peer_ifc->allowed_vlans.count(iface.encapsulation->vlan_id))
            issue(Sev::Warning, "vlan " + std::to_string(iface.encapsulation->vlan_id) + " of " +
                                    d.devices[ep.device].name + ":" + ep.iface +
                                    " is not allowed on trunk " + peer.device + ":" + peer.iface);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

int link_metric(double bandwidth_bps) {
    long long metric = std::llround(1e8 / bandwidth_bps);
    return static_cast<int>(std::max(1ll, metric));
}

std::map<std::string, RoutingTable> compute_routes(const NetworkModel& model) {
    LinkView view;
    view.bandwidth_bps = [&model](int li) { return model.link(li).bandwidth.bps(); };
    view.up = [](int) { return true; };
    return compute_routes(model, view);
}

std::map<std::string, RoutingTable> compute_routes(const NetworkModel& model, const LinkView& view) {
    const TopologyDoc& d = model.doc();
    const auto& endpoints = model.endpoints();

    struct Adjacency {
        int to_dev;
        uint32_t next_hop;
        std::string egress;
        int cost;
    };
    std::vector<std::vector<Adjacency>> adj(d.devices.size());

    // Group endpoints by (subnet, segment); all pairs inside a group are
    // one L3 hop apart.
    std::map<std::pair<SubnetKey, int>, std::vector<int>> groups;
    for (const auto& ep : endpoints) {
        if (ep.segment < 0 || ep.attach_link < 0) continue;
        groups[{{ep.ip.network(), ep.ip.prefix_len}, ep.segment}].push_back(ep.id);
    }
    for (const auto& [key, members] : groups) {
        for (int u : members) {
            const auto& eu = endpoints[u];
            if (!view.up(eu.attach_link)) continue;
            for (int v : members) {
                if (u == v) continue;
                const auto& ev = endpoints[v];
                if (eu.device == ev.device) continue;
                if (!view.up(ev.attach_link)) continue;
                adj[eu.device].push_back({ev.device, ev.ip.address, eu.iface,
                                          link_metric(view.bandwidth_bps(eu.attach_link))});
            }
        }
    }
    for (auto& edges : adj)
        std::sort(edges.begin(), edges.end(), [&](const Adjacency& x, const Adjacency& y) {
            return std::tie(d.devices[x.to_dev].name, x.next_hop, x.egress) <
                   std::tie(d.devices[y.to_dev].name, y.next_hop, y.egress);
        });

    std::map<std::string, RoutingTable> tables;
    const int64_t kInf = std::numeric_limits<int64_t>::max();

    for (size_t src = 0; src < d.devices.size(); ++src) {
        if (d.devices[src].kind == DeviceKind::Switch) continue;
        bool has_endpoint = false;
        for (const auto& ep : endpoints)
            if (ep.device == static_cast<int>(src)) has_endpoint = true;
        if (!has_endpoint) continue;

        struct NodeState {
            int64_t dist = std::numeric_limits<int64_t>::max();
            std::string fh_name;     // first-hop neighbor device (tie-break key)
            uint32_t fh_next = 0;    // first-hop address
            std::string fh_egress;   // our egress interface
            bool done = false;
        };
        std::vector<NodeState> state(d.devices.size());
        state[src].dist = 0;

        auto better = [&](int64_t cd, const std::string& cn, uint32_t ca, const NodeState& cur) {
            return std::tie(cd, cn, ca) < std::tie(cur.dist, cur.fh_name, cur.fh_next);
        };

        // Dijkstra ordered by (dist, device name); only routers carry transit.
        for (;;) {
            int u = -1;
            for (size_t i = 0; i < state.size(); ++i) {
                if (state[i].done || state[i].dist == kInf) continue;
                if (u < 0 || std::tie(state[i].dist, d.devices[i].name) <
                                 std::tie(state[u].dist, d.devices[u].name))
                    u = static_cast<int>(i);
            }
            if (u < 0) break;
            state[u].done = true;
            if (u != static_cast<int>(src) && d.devices[u].kind != DeviceKind::Router) continue;
            for (const auto& e : adj[u]) {
                int64_t cand = state[u].dist + e.cost;
                std::string cn = (u == static_cast<int>(src)) ? d.devices[e.to_dev].name
                                                              : state[u].fh_name;
                uint32_t ca = (u == static_cast<int>(src)) ? e.next_hop : state[u].fh_next;
                std::string ce = (u == static_cast<int>(src)) ? e.egress : state[u].fh_egress;
                if (better(cand, cn, ca, state[e.to_dev])) {
                    state[e.to_dev] = {cand, cn, ca, ce, state[e.to_dev].done};
                }
            }
        }

        RoutingTable table;
        std::set<SubnetKey> connected;
        for (const auto& ep : endpoints) {
            if (ep.device != static_cast<int>(src)) continue;
            SubnetKey key{ep.ip.network(), ep.ip.prefix_len};
            table.routes.push_back({key.network, key.prefix_len, std::nullopt, ep.iface, 0});
            connected.insert(key);
        }
        std::map<SubnetKey, Route> learned;
        for (const auto& ep : endpoints) {
            if (ep.device == static_cast<int>(src)) continue;
            if (ep.attach_link < 0 || !view.up(ep.attach_link)) continue;
            const NodeState& ns = state[ep.device];
            if (ns.dist == kInf || ep.device == static_cast<int>(src)) continue;
            SubnetKey key{ep.ip.network(), ep.ip.prefix_len};
            if (connected.count(key)) continue;
            int64_t metric = ns.dist + link_metric(view.bandwidth_bps(ep.attach_link));
            Route cand{key.network, key.prefix_len, ns.fh_next, ns.fh_egress,
                       static_cast<int>(metric)};
            auto it = learned.find(key);
            if (it == learned.end() ||
                std::tie(cand.metric, *cand.next_hop) < std::tie(it->second.metric, *it->second.next_hop))
                learned[key] = cand;
        }
        for (const auto& [key, route] : learned) table.routes.push_back(route);
        std::sort(table.routes.begin(), table.routes.end(), [](const Route& x, const Route& y) {
            return std::make_tuple(-x.prefix_len, x.prefix, x.metric,
                                   x.next_hop.value_or(0)) <
                   std::make_tuple(-y.prefix_len, y.prefix, y.metric, y.next_hop.value_or(0));
        });
        tables[d.devices[src].name] = std::move(table);
    }
    return tables;
}

std::optional<NextHop> resolve_next_hop(const RoutingTable& table, uint32_t dst) {
    const Route* best = nullptr;
    for (const auto& r : table.routes) {
        if (network_of(dst, r.prefix_len) != r.prefix) continue;
        if (!best) {
            best = &r;
            continue;
        }
        auto key = [](const Route& route) {
            return std::make_tuple(-route.prefix_len, route.metric,
                                   route.next_hop.value_or(0));
        };
        if (key(r) < key(*best)) best = &r;
    }
    if (!best) return std::nullopt;
    return NextHop{best->egress_interface, best->next_hop};
}

std::string format_routing_table(const RoutingTable& table) {
    std::ostringstream out;
    for (const auto& r : table.routes) {
        out << "  " << format_ipv4(r.prefix) << "/" << r.prefix_len;
        if (r.next_hop)
            out << " via " << format_ipv4(*r.next_hop) << " (" << r.egress_interface << ") metric "
                << r.metric;
        else
            out << " connected via " << r.egress_interface;
        out << "\n";
    }
    return out.str();
}

}  // namespace netbench

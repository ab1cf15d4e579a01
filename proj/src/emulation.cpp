#include "netbench/emulation.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "netbench/errors.hpp"
#include "netbench/util.hpp"

namespace netbench {

const char* drop_reason_name(DropReason reason) {
    switch (reason) {
        case DropReason::QueueFull: return "queue_full";
        case DropReason::NoRoute: return "no_route";
        case DropReason::TtlExpired: return "ttl_expired";
        case DropReason::LinkDown: return "link_down";
    }
    return "?";
}

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::Inject: return "inject";
        case EventKind::Dequeue: return "dequeue";
        case EventKind::TxComplete: return "tx_complete";
        case EventKind::Arrive: return "arrive";
        case EventKind::ControlApply: return "control_apply";
        case EventKind::Sample: return "sample";
        case EventKind::ServiceComplete: return "service_complete";
    }
    return "?";
}

std::vector<uint64_t> packetize(uint64_t total_bytes, int mtu) {
    std::vector<uint64_t> sizes;
    auto m = static_cast<uint64_t>(mtu);
    uint64_t full = total_bytes / m;
    uint64_t rest = total_bytes % m;
    sizes.reserve(full + (rest ? 1 : 0));
    for (uint64_t i = 0; i < full; ++i) sizes.push_back(m);
    if (rest) sizes.push_back(rest);
    return sizes;
}

Engine::Engine(const NetworkModel& model, EngineOptions opts)
    : model_(model), opts_(opts), stats_(opts.sample_interval) {
    const TopologyDoc& d = model_.doc();
    dirs_.resize(d.links.size());
    for (size_t li = 0; li < d.links.size(); ++li) {
        const LinkSpec& spec = d.links[li];
        for (int dir = 0; dir < 2; ++dir) {
            LinkDirState& st = dirs_[li][dir];
            const LinkEndpoint& from = dir == 0 ? spec.a : spec.b;
            const LinkEndpoint& to = dir == 0 ? spec.b : spec.a;
            st.id = "link:" + from.to_string() + "->" + to.to_string();
            st.bandwidth_bps = spec.bandwidth.bps();
            st.prop_delay_s = spec.prop_delay.seconds();
            st.capacity = spec.queue_capacity;
        }
    }
    device_counters_.resize(d.devices.size());
    vms_.reserve(d.vms.size());
    for (const auto& vm : d.vms) {
        const DeviceConfig* host = d.find_device(vm.host);
        double disk_rate = host && host->server ? static_cast<double>(host->server->disk_bytes_per_s)
                                                : 1.0;
        vms_.emplace_back(vm.alloc_cores, vm.alloc_ram, disk_rate);
    }
    vm_generation_.assign(d.vms.size(), 0);
    recompute_routes();
}

void Engine::record_trace(double time, uint64_t seq, EventKind kind, std::string detail) {
    if (opts_.trace) trace_.push_back({time, seq, kind, std::move(detail)});
}

uint64_t Engine::schedule(double time, EventKind kind, std::string detail,
                          std::function<void(Engine&)> fn) {
    if (time < now_) throw PastEventError(time, now_);
    uint64_t seq = next_seq_++;
    heap_.push_back({time, seq, kind, std::move(detail), std::move(fn)});
    std::push_heap(heap_.begin(), heap_.end(), [](const PendingEvent& a, const PendingEvent& b) {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    });
    return seq;
}

void Engine::execute_next() {
    std::pop_heap(heap_.begin(), heap_.end(), [](const PendingEvent& a, const PendingEvent& b) {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    });
    PendingEvent ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.time;
    record_trace(ev.time, ev.seq, ev.kind, ev.detail);
    ev.fn(*this);
}

bool Engine::step() {
    if (heap_.empty()) return false;
    execute_next();
    return true;
}

double Engine::run(double until) {
    if (until < now_) throw PastEventError(until, now_);
    while (!heap_.empty() && heap_.front().time <= until) execute_next();
    now_ = until;
    return now_;
}

uint64_t Engine::packets_in_flight() const {
    uint64_t n = 0;
    for (const auto& pair : dirs_)
        for (const auto& st : pair) {
            n += static_cast<uint64_t>(st.fifo_total());
            if (st.busy) ++n;
            n += static_cast<uint64_t>(st.on_wire);
        }
    return n;
}

double Engine::link_time_avg_occupancy(int link, int dir) const {
    const LinkDirState& st = dirs_[link][dir];
    if (now_ <= 0) return 0;
    double integral = st.n_integral + st.n_current * (now_ - st.n_mark_time);
    return integral / now_;
}

void Engine::touch_occupancy(LinkDirState& st, int delta) {
    st.n_integral += st.n_current * (now_ - st.n_mark_time);
    st.n_mark_time = now_;
    st.n_current += delta;
}

int Engine::find_link_by_port(std::string_view device, std::string_view iface) const {
    const TopologyDoc& d = model_.doc();
    for (size_t li = 0; li < d.links.size(); ++li) {
        const LinkSpec& l = d.links[li];
        if ((l.a.device == device && l.a.iface == iface) ||
            (l.b.device == device && l.b.iface == iface))
            return static_cast<int>(li);
    }
    return -1;
}

// ---------------------------------------------------------------------------
// Flows
// ---------------------------------------------------------------------------

uint64_t Engine::add_flow(const WorkloadEntry& entry) {
    FlowState flow;
    flow.id = flows_.size() + 1;
    flow.src_device = entry.src;

    const EndpointInfo* src_ep = model_.default_endpoint(entry.src);
    if (!src_ep) throw UnknownEndpointError(entry.src);
    flow.src_device_idx = src_ep->device;
    flow.src_addr = src_ep->ip.address;

    if (!entry.dst_service.empty()) {
        int vi = model_.vm_index(entry.dst);
        if (vi < 0) throw UnknownEndpointError(entry.dst);
        const VmConfig& vm = model_.doc().vms[vi];
        const ServiceConfig* svc = vm.find_service(entry.dst_service);
        if (!svc) throw UnknownServiceError(entry.dst + ":" + entry.dst_service);
        int ep = model_.vm_endpoint(vi);
        if (ep < 0) throw UnknownEndpointError(entry.dst);
        flow.vm_idx = vi;
        flow.service = svc;
        flow.dst_addr = vm.address;
        flow.dst_device_idx = model_.endpoints()[ep].device;
    } else {
        int vi = model_.vm_index(entry.dst);
        if (vi >= 0) {
            int ep = model_.vm_endpoint(vi);
            if (ep < 0) throw UnknownEndpointError(entry.dst);
            flow.dst_addr = model_.doc().vms[vi].address;
            flow.dst_device_idx = model_.endpoints()[ep].device;
        } else {
            const EndpointInfo* dst_ep = model_.default_endpoint(entry.dst);
            if (!dst_ep) throw UnknownEndpointError(entry.dst);
            flow.dst_addr = dst_ep->ip.address;
            flow.dst_device_idx = dst_ep->device;
        }
    }

    flow.kind = entry.kind;
    flow.request_size = entry.request_size;
    if (entry.response_size)
        flow.response_size = *entry.response_size;
    else if (flow.service)
        flow.response_size = flow.service->response.response_bytes(entry.request_size);
    else
        flow.response_size = 0;
    flow.priority = entry.priority;
    flow.t_injected = entry.t;

    flows_.push_back(flow);
    uint64_t id = flow.id;
    schedule(entry.t, EventKind::Inject, "flow=" + std::to_string(id),
             [id](Engine& e) { e.inject_flow(id); });
    return id;
}

void Engine::inject_flow(uint64_t flow_id) {
    FlowState& flow = flows_[flow_id - 1];
    auto sizes = packetize(flow.request_size, opts_.mtu);
    flow.phase = FlowState::Phase::Request;
    flow.req_packets_left = static_cast<int>(sizes.size());
    for (uint64_t size : sizes) {
        Packet p;
        p.id = next_packet_id_++;
        p.flow_id = flow_id;
        p.src = flow.src_addr;
        p.dst = flow.dst_addr;
        p.size = size;
        p.priority = flow.priority;
        p.ttl = opts_.initial_ttl;
        p.created_at = now_;
        ++injected_;
        forward_at(flow.src_device_idx, {p, -1}, false);
        if (flows_[flow_id - 1].phase == FlowState::Phase::Failed) break;
    }
}

void Engine::fail_flow(uint64_t flow_id, const std::string& reason) {
    if (flow_id == 0 || flow_id > flows_.size()) return;
    FlowState& flow = flows_[flow_id - 1];
    if (flow.phase == FlowState::Phase::Done || flow.phase == FlowState::Phase::Failed) return;
    flow.phase = FlowState::Phase::Failed;
    ++flows_failed_;
    stats_.log_event("t=" + format_fixed6(now_) + " event=flow_failed flow=" +
                     std::to_string(flow_id) + " reason=" + reason +
                     " delivered_bytes=" + std::to_string(flow.bytes_delivered()));
}

void Engine::complete_flow(FlowState& flow) {
    flow.phase = FlowState::Phase::Done;
    ++flows_completed_;
    double latency = now_ - flow.t_injected;
    stats_.record(now_, "flow:" + std::to_string(flow.id), "flow_latency", latency);
    stats_.log_event("t=" + format_fixed6(now_) + " event=flow_complete flow=" +
                     std::to_string(flow.id) + " latency=" + format_fixed6(latency) +
                     " bytes=" + std::to_string(flow.bytes_delivered()));
}

void Engine::begin_service(FlowState& flow) {
    if (flow.vm_idx < 0) {
        complete_flow(flow);
        return;
    }
    VmRuntime& vm = vms_[flow.vm_idx];
    double work = flow.service->cpu_fixed_s +
                  flow.service->cpu_per_byte_s * static_cast<double>(flow.response_size);
    uint64_t disk_bytes = flow.service->kind == ServiceKind::File ? flow.response_size : 0;
    auto verdict = vm.admit(flow.id, now_, work, flow.service->ram_footprint, disk_bytes);
    if (verdict == VmRuntime::Admit::Rejected) {
        fail_flow(flow.id, "ram_exhausted");
        return;
    }
    flow.phase = FlowState::Phase::Service;
    reschedule_vm(flow.vm_idx);
}

void Engine::emit_response(FlowState& flow) {
    if (flow.response_size == 0) {
        complete_flow(flow);
        return;
    }
    flow.phase = FlowState::Phase::Response;
    auto sizes = packetize(flow.response_size, opts_.mtu);
    flow.resp_packets_left = static_cast<int>(sizes.size());
    for (uint64_t size : sizes) {
        Packet p;
        p.id = next_packet_id_++;
        p.flow_id = flow.id;
        p.src = flow.dst_addr;
        p.dst = flow.src_addr;
        p.size = size;
        p.priority = flow.priority;
        p.ttl = opts_.initial_ttl;
        p.created_at = now_;
        ++injected_;
        forward_at(flow.dst_device_idx, {p, -1}, false);
        if (flow.phase == FlowState::Phase::Failed) break;
    }
}

void Engine::reschedule_vm(int vm_idx) {
    auto next = vms_[vm_idx].next_completion();
    if (!next) return;
    uint64_t gen = ++vm_generation_[vm_idx];
    double t = std::max(*next, now_);
    schedule(t, EventKind::ServiceComplete,
             "vm=" + model_.doc().vms[vm_idx].name,
             [vm_idx, gen](Engine& e) { e.on_service_complete(vm_idx, gen); });
}

void Engine::on_service_complete(int vm_idx, uint64_t generation) {
    if (generation != vm_generation_[vm_idx]) return;  // superseded by a newer schedule
    auto done = vms_[vm_idx].pop_completed(now_);
    for (const auto& req : done) {
        FlowState& flow = flows_[req.flow_id - 1];
        if (flow.phase == FlowState::Phase::Service) emit_response(flow);
    }
    reschedule_vm(vm_idx);
}

// ---------------------------------------------------------------------------
// Forwarding
// ---------------------------------------------------------------------------

void Engine::forward_at(int device_idx, InFlightPacket ifp, bool transit) {
    const DeviceConfig& dev = model_.device(device_idx);

    if (dev.kind == DeviceKind::Switch) {
        auto hop = model_.l2_next(device_idx, ifp.target_endpoint);
        if (!hop) {
            ++device_counters_[device_idx].drops_no_route;
            drop_packet(ifp, DropReason::NoRoute, "device:" + dev.name);
            return;
        }
        enqueue_packet(hop->first, hop->second, std::move(ifp));
        return;
    }

    const AddrOwner* owner = model_.addr_owner(ifp.p.dst);
    if (owner && model_.endpoints()[owner->endpoint].device == device_idx) {
        deliver_local(device_idx, ifp);
        return;
    }
    if (dev.kind != DeviceKind::Router && transit) {
        // hosts and servers never forward someone else's packet
        ++device_counters_[device_idx].drops_no_route;
        drop_packet(ifp, DropReason::NoRoute, "device:" + dev.name);
        return;
    }
    if (transit) {
        ifp.p.ttl -= 1;
        if (ifp.p.ttl <= 0) {
            ++device_counters_[device_idx].drops_ttl;
            drop_packet(ifp, DropReason::TtlExpired, "device:" + dev.name);
            return;
        }
    }
    route_and_enqueue(device_idx, std::move(ifp));
}

void Engine::route_and_enqueue(int device_idx, InFlightPacket ifp) {
    const DeviceConfig& dev = model_.device(device_idx);
    auto table_it = tables_.find(dev.name);
    if (table_it == tables_.end()) {
        ++device_counters_[device_idx].drops_no_route;
        drop_packet(ifp, DropReason::NoRoute, "device:" + dev.name);
        return;
    }
    auto hop = resolve_next_hop(table_it->second, ifp.p.dst);
    if (!hop) {
        ++device_counters_[device_idx].drops_no_route;
        drop_packet(ifp, DropReason::NoRoute, "device:" + dev.name);
        return;
    }
    uint32_t target_addr = hop->next_hop ? *hop->next_hop : ifp.p.dst;
    const AddrOwner* owner = model_.addr_owner(target_addr);
    const EndpointInfo* egress = model_.endpoint_of(dev.name, hop->egress_interface);
    if (!owner || !egress || egress->attach_link < 0) {
        ++device_counters_[device_idx].drops_no_route;
        drop_packet(ifp, DropReason::NoRoute, "device:" + dev.name);
        return;
    }
    ifp.target_endpoint = owner->endpoint;
    enqueue_packet(egress->attach_link, egress->attach_dir, std::move(ifp));
}

void Engine::deliver_local(int device_idx, const InFlightPacket& ifp) {
    ++delivered_;
    FlowState& flow = flows_[ifp.p.flow_id - 1];
    if (flow.phase == FlowState::Phase::Request) {
        flow.req_bytes_delivered += ifp.p.size;
        if (--flow.req_packets_left == 0) begin_service(flow);
    } else if (flow.phase == FlowState::Phase::Response) {
        flow.resp_bytes_delivered += ifp.p.size;
        if (--flow.resp_packets_left == 0) complete_flow(flow);
    }
    // packets of failed flows still count as delivered above; no flow action
    (void)device_idx;
}

void Engine::drop_packet(const InFlightPacket& ifp, DropReason reason, const std::string& where) {
    ++dropped_;
    stats_.log_event("t=" + format_fixed6(now_) + " event=drop reason=" +
                     drop_reason_name(reason) + " flow=" + std::to_string(ifp.p.flow_id) +
                     " packet=" + std::to_string(ifp.p.id) + " prio=" +
                     std::to_string(ifp.p.priority) + " at=" + where);
    fail_flow(ifp.p.flow_id, drop_reason_name(reason));
}

// ---------------------------------------------------------------------------
// Link machinery
// ---------------------------------------------------------------------------

void Engine::enqueue_packet(int link, int dir, InFlightPacket ifp) {
    LinkDirState& st = dirs_[link][dir];
    if (!st.up) {
        ++st.drops_link_down;
        drop_packet(ifp, DropReason::LinkDown, st.id);
        return;
    }
    if (!st.busy) {
        // idle transmitter: the packet never sits in a fifo (capacity 0 works)
        start_tx(link, dir, std::move(ifp));
        return;
    }
    int prio = ifp.p.priority;
    if (static_cast<int>(st.fifo[prio].size()) >= st.capacity) {
        ++st.drops_queue_full[prio];
        drop_packet(ifp, DropReason::QueueFull, st.id);
        return;
    }
    ++st.enqueued;
    touch_occupancy(st, +1);
    st.fifo[prio].push_back(std::move(ifp));
}

void Engine::start_tx(int link, int dir, InFlightPacket ifp) {
    LinkDirState& st = dirs_[link][dir];
    st.busy = true;
    touch_occupancy(st, +1);
    uint64_t seq = next_seq_++;
    record_trace(now_, seq, EventKind::Dequeue,
                 st.id + " packet=" + std::to_string(ifp.p.id));
    double tx_time = static_cast<double>(ifp.p.size) * 8.0 / st.bandwidth_bps;
    uint64_t size = ifp.p.size;
    schedule(now_ + tx_time, EventKind::TxComplete,
             st.id + " packet=" + std::to_string(ifp.p.id),
             [link, dir, ifp = std::move(ifp), size](Engine& e) mutable {
                 LinkDirState& s = e.dirs_[link][dir];
                 s.busy = false;
                 e.touch_occupancy(s, -1);
                 s.bytes_tx += size;
                 ++s.on_wire;
                 e.schedule(e.now_ + s.prop_delay_s, EventKind::Arrive,
                            s.id + " packet=" + std::to_string(ifp.p.id),
                            [link, dir, ifp = std::move(ifp)](Engine& e2) mutable {
                                e2.on_arrive(link, dir, std::move(ifp));
                            });
                 e.maybe_start_tx(link, dir);
             });
}

void Engine::maybe_start_tx(int link, int dir) {
    LinkDirState& st = dirs_[link][dir];
    if (st.busy || !st.up) return;
    for (int prio = 7; prio >= 0; --prio) {
        if (st.fifo[prio].empty()) continue;
        InFlightPacket ifp = std::move(st.fifo[prio].front());
        st.fifo[prio].pop_front();
        touch_occupancy(st, -1);
        start_tx(link, dir, std::move(ifp));
        return;
    }
}

void Engine::on_arrive(int link, int dir, InFlightPacket ifp) {
    LinkDirState& st = dirs_[link][dir];
    --st.on_wire;
    const LinkSpec& spec = model_.link(link);
    const LinkEndpoint& far = dir == 0 ? spec.b : spec.a;
    forward_at(model_.device_index(far.device), std::move(ifp), true);
}

// ---------------------------------------------------------------------------
// Control
// ---------------------------------------------------------------------------

void Engine::bind_plan(const ControlPlan& plan) {
    struct Resolved {
        ControlAction action;
        int link = -1;
        int vm = -1;
        uint64_t flow = 0;
    };
    std::vector<Resolved> resolved;
    for (const auto& action : plan.actions) {
        Resolved r{action, -1, -1, 0};
        switch (action.target_type) {
            case ControlAction::TargetType::Link: {
                size_t colon = action.target.find(':');
                if (colon == std::string::npos) throw UnknownTargetError(action.target);
                r.link = find_link_by_port(action.target.substr(0, colon),
                                           action.target.substr(colon + 1));
                if (r.link < 0) throw UnknownTargetError(action.target);
                break;
            }
            case ControlAction::TargetType::Vm:
                r.vm = model_.vm_index(action.target);
                if (r.vm < 0) throw UnknownTargetError(action.target);
                break;
            case ControlAction::TargetType::Flow: {
                auto id = parse_u64(action.target);
                if (!id || *id == 0 || *id > flows_.size()) throw UnknownTargetError(action.target);
                r.flow = *id;
                break;
            }
        }
        resolved.push_back(std::move(r));
    }
    for (auto& r : resolved) {
        ControlAction action = r.action;
        int link = r.link, vm = r.vm;
        uint64_t flow = r.flow;
        schedule(action.t, EventKind::ControlApply,
                 std::string(action_kind_name(action.kind)) + " " + action.target,
                 [action, link, vm, flow](Engine& e) { e.apply_action(action, link, vm, flow); });
    }
}

void Engine::apply_action(const ControlAction& action, int link, int vm_idx, uint64_t flow_id) {
    switch (action.kind) {
        case ActionKind::SetBandwidth:
            set_link_bandwidth(link, action.value);
            break;
        case ActionKind::SetDelay:
            set_link_delay(link, action.value);
            break;
        case ActionKind::SetQueueCapacity:
            set_link_queue_capacity(link, static_cast<int>(action.value));
            break;
        case ActionKind::SetPriority:
            set_flow_priority(flow_id, static_cast<int>(action.value));
            break;
        case ActionKind::LinkDown:
            set_link_up(link, false);
            break;
        case ActionKind::LinkUp:
            set_link_up(link, true);
            break;
        case ActionKind::SetVmCores:
            set_vm_cores(vm_idx, static_cast<int>(action.value));
            break;
        case ActionKind::SetVmRam:
            set_vm_ram(vm_idx, static_cast<uint64_t>(action.value));
            break;
    }
    std::string target_key = action.target_type == ControlAction::TargetType::Link ? "link"
                             : action.target_type == ControlAction::TargetType::Vm ? "vm"
                                                                                   : "flow";
    std::string line = "t=" + format_fixed6(now_) + " event=control_apply kind=" +
                       action_kind_name(action.kind) + " " + target_key + "=" + action.target;
    if (!action.value_text.empty()) line += " value=" + action.value_text;
    stats_.log_event(std::move(line));
}

void Engine::set_link_bandwidth(int link, double bps) {
    for (int dir = 0; dir < 2; ++dir) dirs_[link][dir].bandwidth_bps = bps;
    recompute_routes();
}

void Engine::set_link_delay(int link, double seconds) {
    for (int dir = 0; dir < 2; ++dir) dirs_[link][dir].prop_delay_s = seconds;
}

void Engine::set_link_queue_capacity(int link, int capacity) {
    for (int dir = 0; dir < 2; ++dir) {
        LinkDirState& st = dirs_[link][dir];
        st.capacity = capacity;
        // shrink discards the newest arrivals, the ones a smaller queue
        // would have tail-dropped
        for (int prio = 0; prio < 8; ++prio) {
            while (static_cast<int>(st.fifo[prio].size()) > capacity) {
                InFlightPacket victim = std::move(st.fifo[prio].back());
                st.fifo[prio].pop_back();
                touch_occupancy(st, -1);
                ++st.drops_queue_full[prio];
                drop_packet(victim, DropReason::QueueFull, st.id);
            }
        }
    }
}

void Engine::set_link_up(int link, bool up) {
    for (int dir = 0; dir < 2; ++dir) {
        LinkDirState& st = dirs_[link][dir];
        if (st.up == up) continue;
        st.up = up;
        if (!up) {
            // queued packets are flushed; the one being serialized and any
            // on the wire were dequeued before t and complete undisturbed
            for (int prio = 0; prio < 8; ++prio) {
                while (!st.fifo[prio].empty()) {
                    InFlightPacket victim = std::move(st.fifo[prio].front());
                    st.fifo[prio].pop_front();
                    touch_occupancy(st, -1);
                    ++st.drops_link_down;
                    drop_packet(victim, DropReason::LinkDown, st.id);
                }
            }
        } else {
            maybe_start_tx(link, dir);
        }
    }
    recompute_routes();
}

void Engine::set_vm_cores(int vm_idx, int cores) {
    vms_[vm_idx].advance(now_);
    vms_[vm_idx].set_alloc_cores(cores);
    reschedule_vm(vm_idx);
}

void Engine::set_vm_ram(int vm_idx, uint64_t ram) {
    // shrink only blocks new admissions; held footprints are never evicted
    vms_[vm_idx].advance(now_);
    vms_[vm_idx].set_alloc_ram(ram);
}

void Engine::set_flow_priority(uint64_t flow_id, int priority) {
    if (flow_id == 0 || flow_id > flows_.size()) throw UnknownTargetError(std::to_string(flow_id));
    flows_[flow_id - 1].priority = priority;  // affects packets created after t
}

void Engine::recompute_routes() {
    LinkView view;
    view.bandwidth_bps = [this](int li) { return dirs_[li][0].bandwidth_bps; };
    view.up = [this](int li) { return dirs_[li][0].up; };
    tables_ = compute_routes(model_, view);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

void Engine::schedule_samples(double until) {
    double interval = stats_.sample_interval();
    for (uint64_t k = 0;; ++k) {
        double t = static_cast<double>(k) * interval;
        if (t > until) break;
        schedule(t, EventKind::Sample, "", [](Engine& e) { e.do_sample(); });
    }
}

void Engine::do_sample() {
    const double t = now_;
    const double interval = stats_.sample_interval();
    for (size_t li = 0; li < dirs_.size(); ++li) {
        for (int dir = 0; dir < 2; ++dir) {
            LinkDirState& st = dirs_[li][dir];
            uint64_t window_bytes = st.bytes_tx - st.window_mark;
            st.window_mark = st.bytes_tx;
            double util = static_cast<double>(window_bytes) * 8.0 / (st.bandwidth_bps * interval);
            stats_.record(t, st.id, "utilization", util);
            stats_.record(t, st.id, "bytes_tx", static_cast<double>(st.bytes_tx));
            stats_.record(t, st.id, "drops_link_down", static_cast<double>(st.drops_link_down));
            for (int prio = 0; prio < 8; ++prio) {
                std::string qid = "queue:" + st.id.substr(5) + ":p" + std::to_string(prio);
                stats_.record(t, qid, "queue_len", static_cast<double>(st.fifo[prio].size()));
                stats_.record(t, qid, "drops_queue_full",
                              static_cast<double>(st.drops_queue_full[prio]));
            }
        }
    }
    for (size_t di = 0; di < device_counters_.size(); ++di) {
        const std::string id = "device:" + model_.device(static_cast<int>(di)).name;
        stats_.record(t, id, "drops_no_route", static_cast<double>(device_counters_[di].drops_no_route));
        stats_.record(t, id, "drops_ttl", static_cast<double>(device_counters_[di].drops_ttl));
    }
    for (size_t vi = 0; vi < vms_.size(); ++vi) {
        const VmRuntime& vm = vms_[vi];
        const std::string id = "vm:" + model_.doc().vms[vi].name;
        stats_.record(t, id, "cpu_alloc", static_cast<double>(vm.alloc_cores()));
        stats_.record(t, id, "cpu_used", vm.cpu_used());
        stats_.record(t, id, "ram_alloc", static_cast<double>(vm.alloc_ram()));
        stats_.record(t, id, "ram_used", static_cast<double>(vm.ram_used()));
        stats_.record(t, id, "active_requests", static_cast<double>(vm.active()));
        stats_.record(t, id, "rejects_ram", static_cast<double>(vm.rejects()));
    }
    stats_.record(t, "engine", "flows_completed", static_cast<double>(flows_completed_));
    stats_.record(t, "engine", "flows_failed", static_cast<double>(flows_failed_));
    stats_.record(t, "engine", "packets_injected", static_cast<double>(injected_));
    stats_.record(t, "engine", "packets_delivered", static_cast<double>(delivered_));
    stats_.record(t, "engine", "packets_dropped", static_cast<double>(dropped_));
    stats_.record(t, "engine", "packets_in_flight", static_cast<double>(packets_in_flight()));
}

void Engine::finalize() {
    for (auto& flow : flows_) {
        if (flow.phase != FlowState::Phase::Done && flow.phase != FlowState::Phase::Failed)
            fail_flow(flow.id, "horizon");
    }
}

}  // namespace netbench

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netbench/cloud.hpp"
#include "netbench/control.hpp"
#include "netbench/stats.hpp"
#include "netbench/topology.hpp"
#include "netbench/traffic.hpp"

namespace netbench {

enum class DropReason { QueueFull, NoRoute, TtlExpired, LinkDown };
const char* drop_reason_name(DropReason reason);

struct Packet {
    uint64_t id = 0;
    uint64_t flow_id = 0;
    uint32_t src = 0;
    uint32_t dst = 0;
    uint64_t size = 0;
    int priority = 0;  // 0..7, 7 highest
    int ttl = 0;
    double created_at = 0;
};

enum class EventKind { Inject, Dequeue, TxComplete, Arrive, ControlApply, Sample, ServiceComplete };
const char* event_kind_name(EventKind kind);

struct TraceEvent {
    double time = 0;
    uint64_t seq = 0;
    EventKind kind = EventKind::Inject;
    std::string detail;
};

struct EngineOptions {
    int mtu = 1500;
    int initial_ttl = 64;
    double sample_interval = 1.0;
    bool trace = false;
};

// MTU-size packets plus remainder; payload bytes only, no header overhead.
std::vector<uint64_t> packetize(uint64_t total_bytes, int mtu);

// A packet in the network carries its current L2 target: the endpoint that
// terminates this L3 hop (next-hop router or the final destination).
struct InFlightPacket {
    Packet p;
    int target_endpoint = -1;
};

// One direction of a link: 8 strict-priority fifos feeding one transmitter.
struct LinkDirState {
    std::string id;  // "link:R1:Fa0/1->SW1:Fa0/1"
    double bandwidth_bps = 0;
    double prop_delay_s = 0;
    int capacity = 0;  // per priority class
    bool up = true;
    bool busy = false;
    std::array<std::deque<InFlightPacket>, 8> fifo;
    int on_wire = 0;

    uint64_t enqueued = 0;
    std::array<uint64_t, 8> drops_queue_full{};
    uint64_t drops_link_down = 0;
    uint64_t bytes_tx = 0;
    uint64_t window_mark = 0;  // bytes_tx at the previous sample

    // time-weighted occupancy of fifos + transmitter (queueing "in system")
    double n_integral = 0;
    double n_mark_time = 0;
    int n_current = 0;

    int fifo_total() const {
        int n = 0;
        for (const auto& q : fifo) n += static_cast<int>(q.size());
        return n;
    }
};

struct FlowState {
    uint64_t id = 0;
    std::string src_device;
    int src_device_idx = -1;
    uint32_t src_addr = 0;
    uint32_t dst_addr = 0;
    int dst_device_idx = -1;
    int vm_idx = -1;  // -1: plain sink, no service leg
    const ServiceConfig* service = nullptr;
    WorkloadEntry::Kind kind = WorkloadEntry::Kind::Query;
    uint64_t request_size = 0;
    uint64_t response_size = 0;
    int priority = 0;
    double t_injected = 0;
    uint64_t req_bytes_delivered = 0;
    uint64_t resp_bytes_delivered = 0;
    int req_packets_left = 0;
    int resp_packets_left = 0;

    enum class Phase { Pending, Request, Service, Response, Done, Failed };
    Phase phase = Phase::Pending;

    uint64_t bytes_delivered() const { return req_bytes_delivered + resp_bytes_delivered; }
};

// Single-threaded deterministic event loop over one network model. All
// randomness lives in pregenerated workloads; the engine itself draws none.
class Engine {
public:
    explicit Engine(const NetworkModel& model, EngineOptions opts = {});

    const NetworkModel& model() const { return model_; }
    const EngineOptions& options() const { return opts_; }
    double now() const { return now_; }
    bool has_pending_events() const { return !heap_.empty(); }

    // Throws PastEventError when time < now. Returns the event seq.
    uint64_t schedule(double time, EventKind kind, std::string detail,
                      std::function<void(Engine&)> fn);
    // Executes every event with time <= until; clock ends at until.
    double run(double until);
    bool step();  // one event; false when idle

    uint64_t add_flow(const WorkloadEntry& entry);
    void bind_plan(const ControlPlan& plan);
    void schedule_samples(double until);
    void finalize();  // unresolved flows become flow_failed reason=horizon

    StatsStore& stats() { return stats_; }
    const StatsStore& stats() const { return stats_; }
    const std::vector<TraceEvent>& trace() const { return trace_; }
    const std::map<std::string, RoutingTable>& routing_tables() const { return tables_; }

    uint64_t packets_injected() const { return injected_; }
    uint64_t packets_delivered() const { return delivered_; }
    uint64_t packets_dropped() const { return dropped_; }
    uint64_t packets_in_flight() const;  // measured from queues, transmitters, wire
    uint64_t flows_completed() const { return flows_completed_; }
    uint64_t flows_failed() const { return flows_failed_; }

    const LinkDirState& link_dir(int link, int dir) const { return dirs_[link][dir]; }
    double link_time_avg_occupancy(int link, int dir) const;
    size_t flow_count() const { return flows_.size(); }
    const FlowState& flow(uint64_t id) const { return flows_[id - 1]; }

    int find_link_by_port(std::string_view device, std::string_view iface) const;  // -1 if none

    // control primitives; control_apply events funnel into these
    void set_link_bandwidth(int link, double bps);
    void set_link_delay(int link, double seconds);
    void set_link_queue_capacity(int link, int capacity);
    void set_link_up(int link, bool up);
    void set_vm_cores(int vm_idx, int cores);
    void set_vm_ram(int vm_idx, uint64_t ram);
    void set_flow_priority(uint64_t flow_id, int priority);

private:
    struct PendingEvent {
        double time;
        uint64_t seq;
        EventKind kind;
        std::string detail;
        std::function<void(Engine&)> fn;
    };

    void execute_next();
    void inject_flow(uint64_t flow_id);
    void forward_at(int device_idx, InFlightPacket ifp, bool transit);
    void route_and_enqueue(int device_idx, InFlightPacket ifp);
    void enqueue_packet(int link, int dir, InFlightPacket ifp);
    void start_tx(int link, int dir, InFlightPacket ifp);
    void maybe_start_tx(int link, int dir);
    void on_tx_complete(int link, int dir);
    void on_arrive(int link, int dir, InFlightPacket ifp);
    void deliver_local(int device_idx, const InFlightPacket& ifp);
    void drop_packet(const InFlightPacket& ifp, DropReason reason, const std::string& where);
    void fail_flow(uint64_t flow_id, const std::string& reason);
    void complete_flow(FlowState& flow);
    void begin_service(FlowState& flow);
    void emit_response(FlowState& flow);
    void on_service_complete(int vm_idx, uint64_t generation);
    void reschedule_vm(int vm_idx);
    void apply_action(const ControlAction& action, int link, int vm_idx, uint64_t flow_id);
    void do_sample();
    void recompute_routes();
    void touch_occupancy(LinkDirState& st, int delta);
    void record_trace(double time, uint64_t seq, EventKind kind, std::string detail);

    const NetworkModel& model_;
    EngineOptions opts_;
    StatsStore stats_;
    double now_ = 0;
    uint64_t next_seq_ = 0;
    uint64_t next_packet_id_ = 1;
    std::vector<PendingEvent> heap_;
    std::vector<TraceEvent> trace_;

    std::vector<std::array<LinkDirState, 2>> dirs_;
    std::map<std::string, RoutingTable> tables_;
    std::vector<FlowState> flows_;
    std::vector<VmRuntime> vms_;
    std::vector<uint64_t> vm_generation_;

    struct DeviceCounters {
        uint64_t drops_no_route = 0;
        uint64_t drops_ttl = 0;
    };
    std::vector<DeviceCounters> device_counters_;

    uint64_t injected_ = 0;
    uint64_t delivered_ = 0;
    uint64_t dropped_ = 0;
    uint64_t flows_completed_ = 0;
    uint64_t flows_failed_ = 0;
};

}  // namespace netbench

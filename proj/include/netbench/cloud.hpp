#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace netbench {

struct ActiveRequest {
    uint64_t flow_id = 0;
    double arrived = 0;
    double remaining_work = 0;  // core-seconds
    uint64_t ram_held = 0;
    double disk_ready = 0;  // earliest completion allowed by the disk term
};

// Egalitarian processor sharing with a per-request cap of one core.
// Self-contained so the scheduler can be driven and checked without the
// event engine: admit/advance/next_completion/pop_completed.
class VmRuntime {
public:
    VmRuntime(int alloc_cores, uint64_t alloc_ram, double disk_bytes_per_s)
        : alloc_cores_(alloc_cores), alloc_ram_(alloc_ram), disk_rate_(disk_bytes_per_s) {}

    enum class Admit { Accepted, Rejected };

    // work = cpu_fixed + cpu_per_byte * response bytes; disk_bytes > 0 only
    // for file services. Rejected iff ram_used + footprint would exceed the
    // allocation.
    Admit admit(uint64_t flow_id, double now, double work, uint64_t footprint, uint64_t disk_bytes);

    // Apply PS progress since the last update. No-op when now has not moved.
    void advance(double now);

    // Earliest completion instant assuming no further arrivals; nullopt when
    // nothing is active.
    std::optional<double> next_completion() const;

    // Requests finished by `now` (CPU work spent and disk term satisfied);
    // their RAM is released.
    std::vector<ActiveRequest> pop_completed(double now);

    int alloc_cores() const { return alloc_cores_; }
    uint64_t alloc_ram() const { return alloc_ram_; }
    void set_alloc_cores(int cores) { alloc_cores_ = cores; }
    void set_alloc_ram(uint64_t ram) { alloc_ram_ = ram; }

    int active() const { return static_cast<int>(reqs_.size()); }
    int cpu_active() const;          // requests still owing CPU work
    double cpu_used() const;         // min(alloc_cores, cpu_active)
    uint64_t ram_used() const { return ram_used_; }
    uint64_t rejects() const { return rejects_; }

    static constexpr double kWorkEpsilon = 1e-12;

private:
    double share_rate() const;  // per-request core rate at current occupancy

    int alloc_cores_;
    uint64_t alloc_ram_;
    double disk_rate_;
    double last_update_ = 0;
    uint64_t ram_used_ = 0;
    uint64_t rejects_ = 0;
    std::vector<ActiveRequest> reqs_;
};

}  // namespace netbench

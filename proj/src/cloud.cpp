#include "netbench/cloud.hpp"

#include <algorithm>

namespace netbench {

double VmRuntime::share_rate() const {
    int k = cpu_active();
    if (k == 0) return 0;
    return std::min(1.0, static_cast<double>(alloc_cores_) / static_cast<double>(k));
}

int VmRuntime::cpu_active() const {
    int k = 0;
    for (const auto& r : reqs_)
        if (r.remaining_work > kWorkEpsilon) ++k;
    return k;
}

double VmRuntime::cpu_used() const {
    return static_cast<double>(std::min(alloc_cores_, cpu_active()));
}

void VmRuntime::advance(double now) {
    double dt = now - last_update_;
    if (dt <= 0) {
        last_update_ = std::max(last_update_, now);
        return;
    }
    double rate = share_rate();
    if (rate > 0) {
        for (auto& r : reqs_) {
            if (r.remaining_work <= kWorkEpsilon) continue;
            r.remaining_work -= rate * dt;
            if (r.remaining_work < kWorkEpsilon) r.remaining_work = 0;
        }
    }
    last_update_ = now;
}

VmRuntime::Admit VmRuntime::admit(uint64_t flow_id, double now, double work, uint64_t footprint,
                                  uint64_t disk_bytes) {
    advance(now);
    if (ram_used_ + footprint > alloc_ram_) {
        ++rejects_;
        return Admit::Rejected;
    }
    ActiveRequest req;
    req.flow_id = flow_id;
    req.arrived = now;
    req.remaining_work = work;
    req.ram_held = footprint;
    req.disk_ready = disk_bytes > 0 ? now + static_cast<double>(disk_bytes) / disk_rate_ : now;
    ram_used_ += footprint;
    reqs_.push_back(req);
    return Admit::Accepted;
}

std::optional<double> VmRuntime::next_completion() const {
    if (reqs_.empty()) return std::nullopt;
    double rate = share_rate();
    double best = 0;
    bool found = false;
    for (const auto& r : reqs_) {
        double cpu_done = r.remaining_work > kWorkEpsilon ? last_update_ + r.remaining_work / rate
                                                          : last_update_;
        double t = std::max(cpu_done, r.disk_ready);
        if (!found || t < best) {
            best = t;
            found = true;
        }
    }
    return best;
}

std::vector<ActiveRequest> VmRuntime::pop_completed(double now) {
    advance(now);
    std::vector<ActiveRequest> done;
    for (auto it = reqs_.begin(); it != reqs_.end();) {
        if (it->remaining_work <= kWorkEpsilon && it->disk_ready <= now + kWorkEpsilon) {
            ram_used_ -= it->ram_held;
            done.push_back(*it);
            it = reqs_.erase(it);
        } else {
            ++it;
        }
    }
    return done;
}

}  // namespace netbench

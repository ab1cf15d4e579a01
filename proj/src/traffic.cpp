#include "netbench/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "netbench/emulation.hpp"
#include "netbench/errors.hpp"
#include "netbench/util.hpp"

namespace netbench {

SizeDistribution SizeDistribution::fixed(uint64_t size) {
    if (size == 0) throw Error("fixed size must be > 0");
    SizeDistribution d;
    d.kind = Kind::Fixed;
    d.fixed_size = size;
    return d;
}

SizeDistribution SizeDistribution::empirical(std::vector<std::pair<uint64_t, double>> weighted) {
    if (weighted.empty()) throw EmptySamplesError();
    double total = 0;
    for (const auto& [size, w] : weighted) {
        if (w <= 0) throw Error("empirical weights must be > 0");
        if (size == 0) throw Error("empirical sizes must be > 0");
        total += w;
    }
    for (auto& [size, w] : weighted) w /= total;
    SizeDistribution d;
    d.kind = Kind::Empirical;
    d.atoms = std::move(weighted);
    return d;
}

SizeDistribution SizeDistribution::lognormal(double mu, double sigma) {
    if (sigma < 0) throw Error("lognormal sigma must be >= 0");
    SizeDistribution d;
    d.kind = Kind::Lognormal;
    d.mu = mu;
    d.sigma = sigma;
    return d;
}

double SizeDistribution::mean() const {
    switch (kind) {
        case Kind::Fixed:
            return static_cast<double>(fixed_size);
        case Kind::Empirical: {
            double m = 0;
            for (const auto& [size, w] : atoms) m += static_cast<double>(size) * w;
            return m;
        }
        case Kind::Lognormal:
            return std::exp(mu + sigma * sigma / 2);
    }
    return 0;
}

uint64_t SizeDistribution::draw(Rng& rng) const {
    switch (kind) {
        case Kind::Fixed:
            return fixed_size;
        case Kind::Empirical: {
            // cumulative weights are tiny lists; rebuild on the fly is fine
            double u = rng.uniform01();
            double acc = 0;
            for (const auto& [size, w] : atoms) {
                acc += w;
                if (u < acc) return size;
            }
            return atoms.back().first;
        }
        case Kind::Lognormal: {
            double v = rng.lognormal(mu, sigma);
            auto bytes = static_cast<uint64_t>(std::llround(v));
            return bytes == 0 ? 1 : bytes;
        }
    }
    return 1;
}

SizeDistribution fit_empirical(const std::vector<uint64_t>& samples) {
    if (samples.empty()) throw EmptySamplesError();
    std::map<uint64_t, uint64_t> freq;
    for (uint64_t s : samples) ++freq[s];
    std::vector<std::pair<uint64_t, double>> atoms;
    atoms.reserve(freq.size());
    for (const auto& [size, n] : freq)
        atoms.emplace_back(size, static_cast<double>(n) / static_cast<double>(samples.size()));
    SizeDistribution d;
    d.kind = SizeDistribution::Kind::Empirical;
    d.atoms = std::move(atoms);
    return d;
}

ArrivalModel ArrivalModel::fixed_interval(double seconds) {
    if (seconds <= 0) throw Error("interval must be > 0");
    return {Kind::FixedInterval, seconds};
}

ArrivalModel ArrivalModel::poisson(double rate) {
    if (rate <= 0) throw Error("rate must be > 0");
    return {Kind::Poisson, rate};
}

Workload generate_workload(const SizeDistribution& dist, const ArrivalModel& arrivals, int64_t count,
                           const std::string& src, const std::string& dst, WorkloadEntry::Kind kind,
                           int priority, uint64_t seed) {
    if (count < 0) throw Error("count must be >= 0");
    Workload w;
    w.seed = seed;
    Rng rng(seed);
    double t = 0;
    for (int64_t i = 0; i < count; ++i) {
        // one stream, gap then size, so entry i is a fixed-width slice of it
        if (arrivals.kind == ArrivalModel::Kind::Poisson)
            t += rng.exponential(arrivals.param);
        else
            t = static_cast<double>(i) * arrivals.param;
        WorkloadEntry e;
        e.t = t;
        e.src = src;
        size_t colon = dst.find(':');
        if (colon == std::string::npos) {
            e.dst = dst;
        } else {
            e.dst = dst.substr(0, colon);
            e.dst_service = dst.substr(colon + 1);
        }
        e.kind = kind;
        e.request_size = dist.draw(rng);
        e.priority = priority;
        w.entries.push_back(std::move(e));
    }
    return w;
}

// ---------------------------------------------------------------------------
// Workload file format
// ---------------------------------------------------------------------------

Workload parse_workload(std::string_view text) {
    Workload w;
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

        WorkloadEntry e;
        bool have_t = false, have_src = false, have_dst = false, have_size = false;
        for (const auto& kv : tok) {
            size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw SyntaxError(line_no, "expected key=value, got '" + kv + "'");
            std::string key = kv.substr(0, eq);
            std::string val = kv.substr(eq + 1);
            if (key == "t") {
                auto t = parse_double(val);
                if (!t || *t < 0) throw SyntaxError(line_no, "invalid t '" + val + "'");
                e.t = *t;
                have_t = true;
            } else if (key == "src") {
                if (val.empty()) throw SyntaxError(line_no, "empty src");
                e.src = val;
                have_src = true;
            } else if (key == "dst") {
                size_t colon = val.find(':');
                if (colon == std::string::npos) {
                    e.dst = val;
                } else {
                    e.dst = val.substr(0, colon);
                    e.dst_service = val.substr(colon + 1);
                    if (e.dst_service.empty()) throw SyntaxError(line_no, "empty service in dst");
                }
                if (e.dst.empty()) throw SyntaxError(line_no, "empty dst");
                have_dst = true;
            } else if (key == "kind") {
                if (val == "file") e.kind = WorkloadEntry::Kind::File;
                else if (val == "query") e.kind = WorkloadEntry::Kind::Query;
                else throw SyntaxError(line_no, "kind must be file or query");
            } else if (key == "size") {
                auto s = parse_u64(val);
                if (!s || *s == 0) throw SyntaxError(line_no, "size must be > 0");
                e.request_size = *s;
                have_size = true;
            } else if (key == "resp") {
                auto s = parse_u64(val);
                if (!s) throw SyntaxError(line_no, "invalid resp '" + val + "'");
                e.response_size = *s;
            } else if (key == "prio") {
                auto p = parse_i64(val);
                if (!p || *p < 0 || *p > 7) throw SyntaxError(line_no, "prio must be 0..7");
                e.priority = static_cast<int>(*p);
            } else {
                throw SyntaxError(line_no, "unknown key '" + key + "'");
            }
        }
        if (!have_t || !have_src || !have_dst || !have_size)
            throw SyntaxError(line_no, "entry needs t, src, dst and size");
        w.entries.push_back(std::move(e));
    }
    std::stable_sort(w.entries.begin(), w.entries.end(),
                     [](const WorkloadEntry& a, const WorkloadEntry& b) { return a.t < b.t; });
    return w;
}

std::string emit_workload(const Workload& workload) {
    std::ostringstream out;
    for (const auto& e : workload.entries) {
        out << "t=" << format_shortest(e.t) << " src=" << e.src << " dst=" << e.dst;
        if (!e.dst_service.empty()) out << ":" << e.dst_service;
        out << " kind=" << (e.kind == WorkloadEntry::Kind::File ? "file" : "query");
        out << " size=" << e.request_size;
        if (e.response_size) out << " resp=" << *e.response_size;
        out << " prio=" << e.priority << "\n";
    }
    return out.str();
}

void activate(const Workload& workload, Engine& engine) {
    // validate everything before scheduling anything
    for (const auto& e : workload.entries) {
        if (!engine.model().default_endpoint(e.src))
            throw UnknownEndpointError(e.src);
        if (!e.dst_service.empty()) {
            int vi = engine.model().vm_index(e.dst);
            if (vi < 0) throw UnknownEndpointError(e.dst);
            const VmConfig& vm = engine.model().doc().vms[vi];
            if (!vm.find_service(e.dst_service)) throw UnknownServiceError(e.dst + ":" + e.dst_service);
        } else if (engine.model().vm_index(e.dst) < 0 &&
                   !engine.model().default_endpoint(e.dst)) {
            throw UnknownEndpointError(e.dst);
        }
    }
    for (const auto& e : workload.entries) engine.add_flow(e);
}

}  // namespace netbench

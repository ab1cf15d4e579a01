#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netbench/rng.hpp"

namespace netbench {

class Engine;

struct SizeDistribution {
    enum class Kind { Fixed, Empirical, Lognormal };
    Kind kind = Kind::Fixed;
    uint64_t fixed_size = 0;
    std::vector<std::pair<uint64_t, double>> atoms;  // (size, normalized weight)
    double mu = 0, sigma = 0;

    static SizeDistribution fixed(uint64_t size);
    static SizeDistribution empirical(std::vector<std::pair<uint64_t, double>> weighted);
    static SizeDistribution lognormal(double mu, double sigma);

    double mean() const;
    uint64_t draw(Rng& rng) const;
};

// one atom per distinct size, weight = frequency; throws EmptySamplesError
SizeDistribution fit_empirical(const std::vector<uint64_t>& samples);

struct ArrivalModel {
    enum class Kind { FixedInterval, Poisson };
    Kind kind = Kind::FixedInterval;
    double param = 1.0;  // interval seconds | rate per second

    static ArrivalModel fixed_interval(double seconds);
    static ArrivalModel poisson(double rate);
};

struct WorkloadEntry {
    double t = 0;
    std::string src;
    std::string dst;          // device or vm name
    std::string dst_service;  // empty when dst is a plain sink
    enum class Kind { File, Query };
    Kind kind = Kind::Query;
    uint64_t request_size = 0;
    std::optional<uint64_t> response_size;  // absent: service response rule decides
    int priority = 0;

    bool operator==(const WorkloadEntry&) const = default;
};

struct Workload {
    std::vector<WorkloadEntry> entries;  // sorted by t
    uint64_t seed = 0;                   // 0 for hand-written files

    bool operator==(const Workload&) const = default;
};

Workload generate_workload(const SizeDistribution& dist, const ArrivalModel& arrivals, int64_t count,
                           const std::string& src, const std::string& dst, WorkloadEntry::Kind kind,
                           int priority, uint64_t seed);

Workload parse_workload(std::string_view text);
std::string emit_workload(const Workload& workload);

// Schedules one inject event per entry. Throws UnknownEndpointError /
// UnknownServiceError before anything is scheduled.
void activate(const Workload& workload, Engine& engine);

}  // namespace netbench

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace netbench {

struct ScenarioSpec {
    std::string topology_path;
    std::string workload_path;
    std::string control_path;  // empty: no control plan
    double until = 0;
    uint64_t seed = 0;  // recorded in the summary; generation happens in `gen`
    double sample_interval = 1.0;
    std::string out_dir = ".";
    int mtu = 1500;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 validation, 2 runtime
    std::string message;
    double final_time = 0;
    uint64_t flows_completed = 0;
    uint64_t flows_failed = 0;
    uint64_t packets_injected = 0;
    uint64_t packets_delivered = 0;
    uint64_t packets_dropped = 0;
    uint64_t packets_in_flight = 0;
    bool conservation_ok = false;
    std::string stats_csv_path;
    std::string events_log_path;
    std::string summary_path;
};

RunResult run_scenario(const ScenarioSpec& spec);

// Conservation identity verified from exported samples alone: at every
// sample instant, packets_injected == delivered + dropped + in_flight.
// False also when the csv holds no engine samples.
bool check_conservation_csv(std::string_view csv_text);

}  // namespace netbench

#include "netbench/scenario.hpp"

#include <filesystem>
#include <map>
#include <sstream>

#include "netbench/emulation.hpp"
#include "netbench/errors.hpp"
#include "netbench/util.hpp"

namespace netbench {

bool check_conservation_csv(std::string_view csv_text) {
    // group engine-object packet counters by sample time
    std::map<std::string, std::map<std::string, double>> by_time;
    size_t pos = 0;
    bool first = true;
    while (pos <= csv_text.size()) {
        size_t eol = csv_text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos) ? csv_text.substr(pos)
                                                                : csv_text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? csv_text.size() + 1 : eol + 1;
        if (first) {
            first = false;
            continue;  // header
        }
        if (line.empty()) continue;
        size_t c1 = line.find(',');
        size_t c2 = line.find(',', c1 + 1);
        size_t c3 = line.find(',', c2 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
            c3 == std::string_view::npos)
            return false;
        std::string_view object = line.substr(c1 + 1, c2 - c1 - 1);
        if (object != "engine") continue;
        std::string_view metric = line.substr(c2 + 1, c3 - c2 - 1);
        auto value = parse_double(line.substr(c3 + 1));
        if (!value) return false;
        by_time[std::string(line.substr(0, c1))][std::string(metric)] = *value;
    }
    if (by_time.empty()) return false;
    for (const auto& [t, metrics] : by_time) {
        auto get = [&](const char* name) -> const double* {
            auto it = metrics.find(name);
            return it == metrics.end() ? nullptr : &it->second;
        };
        const double* injected = get("packets_injected");
        const double* delivered = get("packets_delivered");
        const double* dropped = get("packets_dropped");
        const double* in_flight = get("packets_in_flight");
        if (!injected || !delivered || !dropped || !in_flight) return false;
        if (*injected != *delivered + *dropped + *in_flight) return false;
    }
    return true;
}

RunResult run_scenario(const ScenarioSpec& spec) {
    RunResult result;
    auto fail = [&result](int code, std::string message) {
        result.exit_code = code;
        result.message = std::move(message);
        return result;
    };

    if (spec.until <= 0) return fail(1, "until must be > 0");
    if (spec.sample_interval <= 0) return fail(1, "sample interval must be > 0");

    std::string topo_text, workload_text, control_text;
    try {
        topo_text = read_file(spec.topology_path);
    } catch (const IoError& e) {
        return fail(1, e.what());
    }
    try {
        workload_text = read_file(spec.workload_path);
    } catch (const IoError& e) {
        return fail(1, e.what());
    }
    if (!spec.control_path.empty()) {
        try {
            control_text = read_file(spec.control_path);
        } catch (const IoError& e) {
            return fail(1, e.what());
        }
    }

    TopologyDoc doc;
    Workload workload;
    ControlPlan plan;
    try {
        doc = parse_topology(topo_text);
    } catch (const SyntaxError& e) {
        return fail(1, spec.topology_path + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    try {
        workload = parse_workload(workload_text);
    } catch (const SyntaxError& e) {
        return fail(1, spec.workload_path + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    if (!control_text.empty()) {
        try {
            plan = parse_control(control_text);
        } catch (const SyntaxError& e) {
            return fail(1, spec.control_path + ":" + std::to_string(e.line()) + ": " + e.what());
        }
    }

    NetworkModel model = build_network(std::move(doc));
    std::ostringstream diag;
    for (const auto& issue : model.issues())
        diag << (issue.severity == ValidationIssue::Severity::Error ? "error: " : "warning: ")
             << issue.message << "\n";
    if (model.has_errors()) return fail(1, diag.str());

    EngineOptions opts;
    opts.mtu = spec.mtu;
    opts.sample_interval = spec.sample_interval;
    Engine engine(model, opts);
    try {
        activate(workload, engine);
        engine.bind_plan(plan);
    } catch (const Error& e) {
        return fail(1, diag.str() + e.what());
    }

    try {
        engine.schedule_samples(spec.until);
        engine.run(spec.until);
        engine.finalize();
    } catch (const std::exception& e) {
        return fail(2, std::string("runtime error: ") + e.what());
    }

    result.final_time = engine.now();
    result.flows_completed = engine.flows_completed();
    result.flows_failed = engine.flows_failed();
    result.packets_injected = engine.packets_injected();
    result.packets_delivered = engine.packets_delivered();
    result.packets_dropped = engine.packets_dropped();
    result.packets_in_flight = engine.packets_in_flight();

    std::string csv = engine.stats().to_csv();
    result.conservation_ok = check_conservation_csv(csv);

    std::ostringstream summary;
    summary << "scenario: topology=" << spec.topology_path << " workload=" << spec.workload_path;
    if (!spec.control_path.empty()) summary << " control=" << spec.control_path;
    summary << "\n";
    summary << "until=" << format_shortest(spec.until) << " seed=" << spec.seed
            << " sample_interval=" << format_shortest(spec.sample_interval) << " mtu=" << spec.mtu
            << "\n";
    summary << "flows_completed=" << result.flows_completed << " flows_failed=" << result.flows_failed
            << "\n";
    summary << "packets: injected=" << result.packets_injected
            << " delivered=" << result.packets_delivered << " dropped=" << result.packets_dropped
            << " in_flight=" << result.packets_in_flight << "\n";
    summary << "\nobject metric count min max mean p95\n";
    for (const auto& row : engine.stats().summarize_all()) {
        summary << row.object << " " << row.metric << " " << row.count << " "
                << format_fixed6(row.min) << " " << format_fixed6(row.max) << " "
                << format_fixed6(row.mean) << " " << format_fixed6(row.p95) << "\n";
    }
    summary << "\nconservation: " << (result.conservation_ok ? "PASS" : "FAIL") << "\n";

    try {
        std::filesystem::create_directories(spec.out_dir);
        result.stats_csv_path = (std::filesystem::path(spec.out_dir) / "stats.csv").string();
        result.events_log_path = (std::filesystem::path(spec.out_dir) / "events.log").string();
        result.summary_path = (std::filesystem::path(spec.out_dir) / "summary.txt").string();
        write_file_atomic(result.stats_csv_path, csv);
        write_file_atomic(result.events_log_path, engine.stats().events_text());
        write_file_atomic(result.summary_path, summary.str());
    } catch (const std::exception& e) {
        return fail(2, std::string("write failed: ") + e.what());
    }

    result.message = "conservation: " + std::string(result.conservation_ok ? "PASS" : "FAIL");
    return result;
}

}  // namespace netbench

#include "netbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "netbench/errors.hpp"
#include "netbench/util.hpp"

namespace netbench {

StatsStore::StatsStore(double sample_interval) : sample_interval_(sample_interval) {}

const std::vector<std::string>& StatsStore::metric_catalog() {
    static const std::vector<std::string> catalog = {
        "utilization",
        "queue_len",
        "drops_queue_full",
        "drops_no_route",
        "drops_ttl",
        "drops_link_down",
        "bytes_tx",
        "cpu_used",
        "cpu_alloc",
        "ram_used",
        "ram_alloc",
        "active_requests",
        "rejects_ram",
        "flows_completed",
        "flows_failed",
        "flow_latency",
        "packets_injected",
        "packets_delivered",
        "packets_dropped",
        "packets_in_flight",
    };
    return catalog;
}

bool StatsStore::metric_known(std::string_view metric) {
    const auto& catalog = metric_catalog();
    return std::find(catalog.begin(), catalog.end(), metric) != catalog.end();
}

void StatsStore::record(double time, std::string object, std::string metric, double value) {
    if (!metric_known(metric)) throw UnknownMetricError(metric);
    samples_.push_back({time, std::move(object), std::move(metric), value});
}

void StatsStore::log_event(std::string line) { events_.push_back(std::move(line)); }

std::string StatsStore::to_csv() const {
    std::string out = "time,object,metric,value\n";
    for (const auto& s : samples_) {
        out += format_fixed6(s.time);
        out += ',';
        out += s.object;
        out += ',';
        out += s.metric;
        out += ',';
        out += format_fixed6(s.value);
        out += '\n';
    }
    return out;
}

std::string StatsStore::events_text() const {
    std::string out;
    for (const auto& line : events_) {
        out += line;
        out += '\n';
    }
    return out;
}

namespace {

SummaryRow summarize_values(std::string object, std::string metric, std::vector<double> values) {
    SummaryRow row;
    row.object = std::move(object);
    row.metric = std::move(metric);
    row.count = values.size();
    std::sort(values.begin(), values.end());
    row.min = values.front();
    row.max = values.back();
    double sum = 0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    // nearest-rank: value at index ceil(0.95 n), 1-based
    size_t rank = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
    if (rank < 1) rank = 1;
    row.p95 = values[rank - 1];
    return row;
}

}  // namespace

SummaryRow StatsStore::summarize(std::string_view object_pattern, std::string_view metric,
                                 double t_begin, double t_end) const {
    bool prefix = !object_pattern.empty() && object_pattern.back() == '*';
    std::string_view stem = prefix ? object_pattern.substr(0, object_pattern.size() - 1)
                                   : object_pattern;
    std::vector<double> values;
    for (const auto& s : samples_) {
        if (s.time < t_begin || s.time > t_end) continue;
        if (s.metric != metric) continue;
        if (prefix ? s.object.rfind(stem, 0) != 0 : s.object != stem) continue;
        values.push_back(s.value);
    }
    if (values.empty()) throw NoDataError(std::string(object_pattern) + "/" + std::string(metric));
    return summarize_values(std::string(object_pattern), std::string(metric), std::move(values));
}

std::vector<SummaryRow> StatsStore::summarize_all() const {
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto& s : samples_) groups[{s.object, s.metric}].push_back(s.value);
    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, values] : groups)
        rows.push_back(summarize_values(key.first, key.second, std::move(values)));
    return rows;
}

}  // namespace netbench

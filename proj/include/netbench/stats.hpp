#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace netbench {

struct Sample {
    double time = 0;
    std::string object;
    std::string metric;
    double value = 0;
};

struct SummaryRow {
    std::string object;
    std::string metric;
    uint64_t count = 0;
    double min = 0;
    double max = 0;
    double mean = 0;
    double p95 = 0;  // nearest-rank
};

// Append-only sample store plus the event log. The metric catalog is closed:
// recording under an unlisted name throws UnknownMetricError.
class StatsStore {
public:
    explicit StatsStore(double sample_interval = 1.0);

    double sample_interval() const { return sample_interval_; }

    static const std::vector<std::string>& metric_catalog();
    static bool metric_known(std::string_view metric);

    void record(double time, std::string object, std::string metric, double value);
    void log_event(std::string line);

    const std::vector<Sample>& samples() const { return samples_; }
    const std::vector<std::string>& events() const { return events_; }

    // header `time,object,metric,value`, rows in append order, %.6f values
    std::string to_csv() const;
    std::string events_text() const;

    // object_pattern: exact id, or a prefix ending in '*'. Window is
    // inclusive on both ends. Throws NoDataError on an empty selection.
    SummaryRow summarize(std::string_view object_pattern, std::string_view metric, double t_begin,
                         double t_end) const;

    // one row per (object, metric) pair present, ordered by (object, metric)
    std::vector<SummaryRow> summarize_all() const;

private:
    double sample_interval_;
    std::vector<Sample> samples_;
    std::vector<std::string> events_;
};

}  // namespace netbench

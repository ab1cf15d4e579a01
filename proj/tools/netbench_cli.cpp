#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netbench/control.hpp"
#include "netbench/emulation.hpp"
#include "netbench/errors.hpp"
#include "netbench/scenario.hpp"
#include "netbench/topology.hpp"
#include "netbench/traffic.hpp"
#include "netbench/util.hpp"

namespace {

int cmd_run(const netbench::ScenarioSpec& spec) {
    netbench::RunResult result = netbench::run_scenario(spec);
    if (result.exit_code != 0) {
        std::fprintf(stderr, "%s\n", result.message.c_str());
        return result.exit_code;
    }
    std::printf("flows: %llu completed, %llu failed\n",
                static_cast<unsigned long long>(result.flows_completed),
                static_cast<unsigned long long>(result.flows_failed));
    std::printf("packets: %llu injected, %llu delivered, %llu dropped, %llu in flight\n",
                static_cast<unsigned long long>(result.packets_injected),
                static_cast<unsigned long long>(result.packets_delivered),
                static_cast<unsigned long long>(result.packets_dropped),
                static_cast<unsigned long long>(result.packets_in_flight));
    std::printf("wrote %s, %s, %s\n", result.stats_csv_path.c_str(),
                result.events_log_path.c_str(), result.summary_path.c_str());
    std::printf("%s\n", result.message.c_str());
    return 0;
}

struct GenArgs {
    uint64_t fixed = 0;
    std::string empirical_path;
    std::vector<double> lognormal;
    double interval = 0;
    double poisson = 0;
    int64_t count = 0;
    uint64_t seed = 0;
    std::string src = "src";
    std::string dst = "sink";
    std::string kind = "query";
    int priority = 0;
    std::string out;
};

int cmd_gen(const GenArgs& args) {
    int dist_picked = (args.fixed > 0) + !args.empirical_path.empty() + !args.lognormal.empty();
    if (dist_picked != 1) {
        std::fprintf(stderr, "pick exactly one of --fixed, --empirical, --lognormal\n");
        return 1;
    }
    int arrivals_picked = (args.interval > 0) + (args.poisson > 0);
    if (arrivals_picked != 1) {
        std::fprintf(stderr, "pick exactly one of --interval, --poisson\n");
        return 1;
    }
    if (args.count < 0) {
        std::fprintf(stderr, "--count must be >= 0\n");
        return 1;
    }

    netbench::SizeDistribution dist;
    try {
        if (args.fixed > 0) {
            dist = netbench::SizeDistribution::fixed(args.fixed);
        } else if (!args.empirical_path.empty()) {
            std::string text = netbench::read_file(args.empirical_path);
            std::vector<uint64_t> samples;
            int line_no = 0;
            size_t pos = 0;
            while (pos <= text.size()) {
                size_t eol = text.find('\n', pos);
                std::string line = (eol == std::string::npos) ? text.substr(pos)
                                                              : text.substr(pos, eol - pos);
                ++line_no;
                pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
                auto tok = netbench::split_ws(netbench::strip_comment(line));
                for (const auto& t : tok) {
                    auto v = netbench::parse_u64(t);
                    if (!v || *v == 0) {
                        std::fprintf(stderr, "%s:%d: bad size '%s'\n", args.empirical_path.c_str(),
                                     line_no, t.c_str());
                        return 1;
                    }
                    samples.push_back(*v);
                }
            }
            dist = netbench::fit_empirical(samples);
        } else {
            if (args.lognormal.size() != 2) {
                std::fprintf(stderr, "--lognormal takes MU SIGMA\n");
                return 1;
            }
            dist = netbench::SizeDistribution::lognormal(args.lognormal[0], args.lognormal[1]);
        }

        netbench::ArrivalModel arrivals = args.interval > 0
                                              ? netbench::ArrivalModel::fixed_interval(args.interval)
                                              : netbench::ArrivalModel::poisson(args.poisson);
        auto kind = args.kind == "file" ? netbench::WorkloadEntry::Kind::File
                                        : netbench::WorkloadEntry::Kind::Query;
        netbench::Workload w = netbench::generate_workload(dist, arrivals, args.count, args.src,
                                                           args.dst, kind, args.priority, args.seed);
        std::string text = netbench::emit_workload(w);
        if (args.out.empty())
            std::fputs(text.c_str(), stdout);
        else
            netbench::write_file_atomic(args.out, text);
    } catch (const netbench::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    std::string text;
    try {
        text = netbench::read_file(path);
    } catch (const netbench::IoError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    netbench::TopologyDoc doc;
    try {
        doc = netbench::parse_topology(text);
    } catch (const netbench::SyntaxError& e) {
        std::fprintf(stderr, "%s:%d: %s\n", path.c_str(), e.line(), e.what());
        return 1;
    }
    netbench::NetworkModel model = netbench::build_network(std::move(doc));
    if (model.device_count() == 0) std::printf("warning: empty model\n");
    for (const auto& issue : model.issues())
        std::printf("%s: %s\n",
                    issue.severity == netbench::ValidationIssue::Severity::Error ? "error" : "warning",
                    issue.message.c_str());
    auto tables = netbench::compute_routes(model);
    for (const auto& [device, table] : tables) {
        std::printf("routes %s:\n%s", device.c_str(), netbench::format_routing_table(table).c_str());
    }
    return model.has_errors() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"network and cloud test bench simulator"};
    app.require_subcommand(1);

    netbench::ScenarioSpec spec;
    CLI::App* run = app.add_subcommand("run", "run a scenario");
    run->add_option("--topology", spec.topology_path, "topology file")->required();
    run->add_option("--workload", spec.workload_path, "workload file")->required();
    run->add_option("--control", spec.control_path, "control plan file");
    run->add_option("--until", spec.until, "run horizon, seconds")->required();
    run->add_option("--seed", spec.seed, "seed recorded in the summary");
    run->add_option("--interval", spec.sample_interval, "sample interval, seconds");
    run->add_option("--out", spec.out_dir, "artifact directory");
    run->add_option("--mtu", spec.mtu, "packetizer MTU, bytes");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a workload");
    gen->add_option("--fixed", gen_args.fixed, "fixed size, bytes");
    gen->add_option("--empirical", gen_args.empirical_path, "sample file, one size per line");
    gen->add_option("--lognormal", gen_args.lognormal, "mu sigma of log-bytes")->expected(2);
    gen->add_option("--interval", gen_args.interval, "fixed interarrival, seconds");
    gen->add_option("--poisson", gen_args.poisson, "poisson rate, 1/s");
    gen->add_option("--count", gen_args.count, "number of entries")->required();
    gen->add_option("--seed", gen_args.seed, "rng seed");
    gen->add_option("--src", gen_args.src, "source host name");
    gen->add_option("--dst", gen_args.dst, "destination (device or vm:service)");
    gen->add_option("--kind", gen_args.kind, "file|query")
        ->check(CLI::IsMember({"file", "query"}));
    gen->add_option("--prio", gen_args.priority, "priority 0..7")->check(CLI::Range(0, 7));
    gen->add_option("--out", gen_args.out, "output path (stdout when absent)");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "check a topology and print routes");
    validate->add_option("topology", validate_path, "topology file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(spec);
    if (gen->parsed()) return cmd_gen(gen_args);
    return cmd_validate(validate_path);
}

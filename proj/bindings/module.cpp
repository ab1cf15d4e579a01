#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "netbench/cloud.hpp"
#include "netbench/control.hpp"
#include "netbench/emulation.hpp"
#include "netbench/rng.hpp"
#include "netbench/scenario.hpp"
#include "netbench/topology.hpp"
#include "netbench/traffic.hpp"

namespace py = pybind11;
using namespace netbench;

PYBIND11_MODULE(netbench, m) {
    m.doc() = "network and cloud test bench simulator";

    py::class_<Rng>(m, "Rng")
        .def(py::init<uint64_t>(), py::arg("seed"))
        .def("next_u64", &Rng::next_u64)
        .def("uniform01", &Rng::uniform01)
        .def("exponential", &Rng::exponential, py::arg("rate"))
        .def("normal", &Rng::normal)
        .def("lognormal", &Rng::lognormal, py::arg("mu"), py::arg("sigma"));

    // ---- topology ----

    py::class_<TopologyDoc>(m, "TopologyDoc")
        .def(py::self == py::self)
        .def_property_readonly("device_names",
                               [](const TopologyDoc& d) {
                                   std::vector<std::string> out;
                                   for (const auto& dev : d.devices) out.push_back(dev.name);
                                   return out;
                               })
        .def_property_readonly("vm_names", [](const TopologyDoc& d) {
            std::vector<std::string> out;
            for (const auto& vm : d.vms) out.push_back(vm.name);
            return out;
        });
    m.def("parse_topology", [](const std::string& text) { return parse_topology(text); },
          py::arg("text"));
    m.def("emit_topology", &emit_topology, py::arg("doc"));

    py::class_<NetworkModel>(m, "NetworkModel")
        .def("has_errors", &NetworkModel::has_errors)
        .def_property_readonly("issues",
                               [](const NetworkModel& model) {
                                   std::vector<std::string> out;
                                   for (const auto& i : model.issues())
                                       out.push_back((i.severity == ValidationIssue::Severity::Error
                                                          ? std::string("error: ")
                                                          : std::string("warning: ")) +
                                                     i.message);
                                   return out;
                               })
        .def_property_readonly("vlan_ids",
                               [](const NetworkModel& model) {
                                   std::vector<int> out;
                                   for (const auto& [id, members] : model.vlan_domains())
                                       out.push_back(id);
                                   return out;
                               })
        .def_property_readonly("subnets", [](const NetworkModel& model) {
            std::vector<std::string> out;
            for (const auto& [key, members] : model.subnets()) out.push_back(key.to_string());
            return out;
        });
    m.def("build_network", [](const TopologyDoc& doc) { return build_network(doc); },
          py::arg("doc"));

    py::class_<RoutingTable>(m, "RoutingTable")
        .def("__len__", [](const RoutingTable& t) { return t.routes.size(); })
        .def("__str__", [](const RoutingTable& t) { return format_routing_table(t); });
    m.def("compute_routes",
          [](const NetworkModel& model) { return compute_routes(model); }, py::arg("model"));
    m.def("format_routing_table", &format_routing_table, py::arg("table"));

    // ---- traffic ----

    py::class_<SizeDistribution>(m, "SizeDistribution")
        .def_static("fixed", &SizeDistribution::fixed, py::arg("size"))
        .def_static("empirical", &SizeDistribution::empirical, py::arg("weighted"))
        .def_static("lognormal", &SizeDistribution::lognormal, py::arg("mu"), py::arg("sigma"))
        .def("mean", &SizeDistribution::mean)
        .def("draw", &SizeDistribution::draw, py::arg("rng"));
    m.def("fit_empirical", &fit_empirical, py::arg("samples"));

    py::class_<ArrivalModel>(m, "ArrivalModel")
        .def_static("fixed_interval", &ArrivalModel::fixed_interval, py::arg("seconds"))
        .def_static("poisson", &ArrivalModel::poisson, py::arg("rate"));

    py::enum_<WorkloadEntry::Kind>(m, "FlowKind")
        .value("File", WorkloadEntry::Kind::File)
        .value("Query", WorkloadEntry::Kind::Query);

    py::class_<WorkloadEntry>(m, "WorkloadEntry")
        .def(py::init<>())
        .def_readwrite("t", &WorkloadEntry::t)
        .def_readwrite("src", &WorkloadEntry::src)
        .def_readwrite("dst", &WorkloadEntry::dst)
        .def_readwrite("dst_service", &WorkloadEntry::dst_service)
        .def_readwrite("kind", &WorkloadEntry::kind)
        .def_readwrite("request_size", &WorkloadEntry::request_size)
        .def_readwrite("response_size", &WorkloadEntry::response_size)
        .def_readwrite("priority", &WorkloadEntry::priority)
        .def(py::self == py::self);

    py::class_<Workload>(m, "Workload")
        .def(py::init<>())
        .def_readwrite("entries", &Workload::entries)
        .def_readwrite("seed", &Workload::seed)
        .def(py::self == py::self);
    m.def("generate_workload", &generate_workload, py::arg("dist"), py::arg("arrivals"),
          py::arg("count"), py::arg("src"), py::arg("dst"), py::arg("kind"), py::arg("priority"),
          py::arg("seed"));
    m.def("parse_workload", [](const std::string& text) { return parse_workload(text); },
          py::arg("text"));
    m.def("emit_workload", &emit_workload, py::arg("workload"));

    // ---- control ----

    py::class_<ControlPlan>(m, "ControlPlan")
        .def("__len__", [](const ControlPlan& plan) { return plan.actions.size(); })
        .def(py::self == py::self);
    m.def("parse_control", [](const std::string& text) { return parse_control(text); },
          py::arg("text"));

    // ---- cloud ----

    py::class_<ActiveRequest>(m, "ActiveRequest")
        .def_readonly("flow_id", &ActiveRequest::flow_id)
        .def_readonly("arrived", &ActiveRequest::arrived);

    py::class_<VmRuntime>(m, "VmRuntime")
        .def(py::init<int, uint64_t, double>(), py::arg("alloc_cores"), py::arg("alloc_ram"),
             py::arg("disk_bytes_per_s"))
        .def("admit",
             [](VmRuntime& vm, uint64_t flow_id, double now, double work, uint64_t footprint,
                uint64_t disk_bytes) {
                 return vm.admit(flow_id, now, work, footprint, disk_bytes) ==
                        VmRuntime::Admit::Accepted;
             },
             py::arg("flow_id"), py::arg("now"), py::arg("work"), py::arg("footprint"),
             py::arg("disk_bytes"))
        .def("advance", &VmRuntime::advance, py::arg("now"))
        .def("next_completion", &VmRuntime::next_completion)
        .def("pop_completed", &VmRuntime::pop_completed, py::arg("now"))
        .def("set_alloc_cores", &VmRuntime::set_alloc_cores, py::arg("cores"))
        .def("set_alloc_ram", &VmRuntime::set_alloc_ram, py::arg("ram"))
        .def_property_readonly("alloc_cores", &VmRuntime::alloc_cores)
        .def_property_readonly("alloc_ram", &VmRuntime::alloc_ram)
        .def_property_readonly("active", &VmRuntime::active)
        .def_property_readonly("cpu_used", &VmRuntime::cpu_used)
        .def_property_readonly("ram_used", &VmRuntime::ram_used)
        .def_property_readonly("rejects", &VmRuntime::rejects);

    // ---- emulation / scenario ----

    m.def("packetize", &packetize, py::arg("total_bytes"), py::arg("mtu") = 1500);

    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_readwrite("topology_path", &ScenarioSpec::topology_path)
        .def_readwrite("workload_path", &ScenarioSpec::workload_path)
        .def_readwrite("control_path", &ScenarioSpec::control_path)
        .def_readwrite("until", &ScenarioSpec::until)
        .def_readwrite("seed", &ScenarioSpec::seed)
        .def_readwrite("sample_interval", &ScenarioSpec::sample_interval)
        .def_readwrite("out_dir", &ScenarioSpec::out_dir)
        .def_readwrite("mtu", &ScenarioSpec::mtu);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("exit_code", &RunResult::exit_code)
        .def_readonly("message", &RunResult::message)
        .def_readonly("final_time", &RunResult::final_time)
        .def_readonly("flows_completed", &RunResult::flows_completed)
        .def_readonly("flows_failed", &RunResult::flows_failed)
        .def_readonly("packets_injected", &RunResult::packets_injected)
        .def_readonly("packets_delivered", &RunResult::packets_delivered)
        .def_readonly("packets_dropped", &RunResult::packets_dropped)
        .def_readonly("packets_in_flight", &RunResult::packets_in_flight)
        .def_readonly("conservation_ok", &RunResult::conservation_ok)
        .def_readonly("stats_csv_path", &RunResult::stats_csv_path)
        .def_readonly("events_log_path", &RunResult::events_log_path)
        .def_readonly("summary_path", &RunResult::summary_path);
    m.def("run_scenario", &run_scenario, py::arg("spec"));
    m.def("check_conservation_csv",
          [](const std::string& text) { return check_conservation_csv(text); }, py::arg("text"));
}

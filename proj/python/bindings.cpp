#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "callrisk/community.hpp"
#include "callrisk/density.hpp"
#include "callrisk/distance.hpp"
#include "callrisk/errors.hpp"
#include "callrisk/graph.hpp"
#include "callrisk/heuristics.hpp"
#include "callrisk/io.hpp"
#include "callrisk/pipeline.hpp"
#include "callrisk/report.hpp"
#include "callrisk/version.hpp"

namespace py = pybind11;
using namespace callrisk;

namespace {

CallGraph graph_from_edges(
    const std::vector<std::tuple<std::string, std::string, std::int64_t>>& edges,
    const std::vector<std::string>& isolated_nodes) {
    CallGraph::Builder builder;
    for (const auto& id : isolated_nodes) builder.add_node(id);
    for (const auto& [caller, callee, weight] : edges) builder.add_edge(caller, callee, weight);
    return builder.build();
}

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
    RunConfig cfg;
    for (const auto& item : kwargs) {
        auto key = item.first.cast<std::string>();
        if (key == "algorithms") {
            cfg.algorithms.clear();
            for (const auto& name : item.second.cast<std::vector<std::string>>())
                cfg.algorithms.push_back(algorithm_from_name(name));
        } else if (key == "eps") cfg.eps = item.second.cast<double>();
        else if (key == "min_pts") cfg.min_pts = item.second.cast<int>();
        else if (key == "min_cluster_size") cfg.min_cluster_size = item.second.cast<int>();
        else if (key == "resolution") cfg.resolution = item.second.cast<double>();
        else if (key == "seed") cfg.seed = item.second.cast<std::uint64_t>();
        else if (key == "top_k") cfg.top_k = item.second.cast<int>();
        else if (key == "node_cap") cfg.node_cap = item.second.cast<int>();
        else if (key == "no_timing") cfg.no_timing = item.second.cast<bool>();
        else throw ParameterError("unknown analyze option: " + key);
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(callrisk, m) {
    m.doc() = "Call graph clustering and structural risk heuristics";
    m.attr("__version__") = kVersion;

    py::register_exception<ParseError>(m, "DotParseError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

    py::class_<NodeRecord>(m, "Node")
        .def_readonly("id", &NodeRecord::id)
        .def_readonly("package", &NodeRecord::package)
        .def_readonly("label", &NodeRecord::label)
        .def("__repr__", [](const NodeRecord& n) { return "<Node " + n.id + ">"; });

    py::class_<CallGraph>(m, "CallGraph")
        .def_static(
            "from_edges",
            [](const std::vector<std::tuple<std::string, std::string, std::int64_t>>& edges,
               const std::vector<std::string>& nodes) { return graph_from_edges(edges, nodes); },
            py::arg("edges"), py::arg("nodes") = std::vector<std::string>{})
        .def_property_readonly("node_count", &CallGraph::node_count)
        .def_property_readonly("edge_count", &CallGraph::edge_count)
        .def_property_readonly("self_loop_count", &CallGraph::self_loop_count)
        .def_property_readonly("total_weight", &CallGraph::total_weight)
        .def_property_readonly("nodes", &CallGraph::nodes)
        .def("edges",
             [](const CallGraph& g) {
                 std::vector<std::tuple<std::string, std::string, std::int64_t>> out;
                 out.reserve(g.edges().size());
                 for (const auto& e : g.edges())
                     out.emplace_back(g.node_id(e.caller), g.node_id(e.callee), e.weight);
                 return out;
             })
        .def("__repr__", [](const CallGraph& g) {
            return "<CallGraph nodes=" + std::to_string(g.node_count()) +
                   " edges=" + std::to_string(g.edge_count()) + ">";
        });

    m.def("parse_dot", &parse_dot, py::arg("text"));
    m.def("parse_edge_list", &parse_edge_list, py::arg("text"));
    m.def("serialize_edge_list", &serialize_edge_list, py::arg("graph"));
    m.def("load_graph", &load_graph, py::arg("path"), py::arg("format") = "auto");

    py::class_<DistanceModel>(m, "DistanceModel")
        .def_static(
            "from_dense",
            [](const std::vector<std::string>& ids, const std::vector<std::vector<double>>& rows,
               double sentinel) {
                std::vector<double> flat;
                flat.reserve(ids.size() * ids.size());
                for (const auto& row : rows) {
                    if (row.size() != ids.size())
                        throw ParameterError("distance matrix must be square");
                    flat.insert(flat.end(), row.begin(), row.end());
                }
                return DistanceModel::from_dense(ids, std::move(flat), sentinel);
            },
            py::arg("node_ids"), py::arg("rows"), py::arg("sentinel"))
        .def_property_readonly("size", &DistanceModel::size)
        .def_property_readonly("sentinel", &DistanceModel::sentinel)
        .def_property_readonly("node_ids", &DistanceModel::node_ids)
        .def("at", &DistanceModel::at, py::arg("i"), py::arg("j"));

    m.def("hop_distance_model", &hop_distance_model, py::arg("graph"),
          py::arg("node_cap") = 5000);

    py::class_<Clustering>(m, "Clustering")
        .def_property_readonly("node_order",
                               [](const Clustering& c) { return c.node_order; })
        .def_property_readonly("labels", [](const Clustering& c) { return c.labels; })
        .def_property_readonly("algorithm",
                               [](const Clustering& c) { return algorithm_name(c.algorithm); })
        .def_property_readonly("params", [](const Clustering& c) { return c.params; })
        .def_property_readonly("quality", [](const Clustering& c) { return c.quality; })
        .def_property_readonly("cluster_count", &Clustering::cluster_count)
        .def_property_readonly("noise_count", &Clustering::noise_count)
        .def("to_json", &clustering_to_json)
        .def("__repr__", [](const Clustering& c) {
            return std::string("<Clustering ") + algorithm_name(c.algorithm) +
                   " clusters=" + std::to_string(c.cluster_count()) + ">";
        });

    m.def("dbscan", &dbscan, py::arg("distances"), py::arg("eps"), py::arg("min_pts"));
    m.def("hdbscan", &hdbscan, py::arg("distances"), py::arg("min_cluster_size"),
          py::arg("k") = 0);
    m.def("core_distances", &core_distances, py::arg("distances"), py::arg("k"));
    m.def("mutual_reachability", &mutual_reachability, py::arg("distances"), py::arg("k"));
    m.def("silhouette", &silhouette, py::arg("distances"), py::arg("clustering"));

    py::class_<UndirectedView>(m, "UndirectedView")
        .def_property_readonly("node_count", &UndirectedView::node_count)
        .def_property_readonly("total_weight_2m",
                               [](const UndirectedView& v) { return v.total_weight_2m; });
    m.def("project_undirected", &project_undirected, py::arg("graph"));

    py::class_<Partition>(m, "Partition")
        .def_static("from_labels", &Partition::from_labels, py::arg("view"), py::arg("labels"))
        .def_property_readonly("labels", [](const Partition& p) { return p.labels; })
        .def_property_readonly("community_count", &Partition::community_count);

    m.def("modularity", &modularity, py::arg("view"), py::arg("partition"),
          py::arg("resolution") = 1.0);
    m.def("louvain", &louvain, py::arg("view"), py::arg("resolution") = 1.0,
          py::arg("seed") = 42);
    m.def("leiden", &leiden, py::arg("view"), py::arg("resolution") = 1.0, py::arg("seed") = 42);
    m.def("check_connectivity", &check_connectivity, py::arg("view"), py::arg("partition"));

    py::class_<HeuristicConfig>(m, "HeuristicConfig")
        .def(py::init<>())
        .def_readwrite("bridging_max_cluster_size", &HeuristicConfig::bridging_max_cluster_size)
        .def_readwrite("bridging_min_neighbor_clusters",
                       &HeuristicConfig::bridging_min_neighbor_clusters)
        .def_readwrite("hotspot_min_incoming_zscore",
                       &HeuristicConfig::hotspot_min_incoming_zscore)
        .def_readwrite("hub_min_degree_zscore", &HeuristicConfig::hub_min_degree_zscore)
        .def_readwrite("hub_min_cluster_spread", &HeuristicConfig::hub_min_cluster_spread)
        .def_readwrite("weak_min_ratio", &HeuristicConfig::weak_min_ratio)
        .def_static("from_text", &HeuristicConfig::from_text, py::arg("text"));

    py::class_<Finding>(m, "Finding")
        .def_property_readonly("heuristic",
                               [](const Finding& f) { return heuristic_name(f.heuristic); })
        .def_property_readonly("subject_kind",
                               [](const Finding& f) { return f.node_subject ? "node" : "cluster"; })
        .def_readonly("subject", &Finding::subject)
        .def_readonly("score", &Finding::score)
        .def_readonly("rank", &Finding::rank)
        .def_readonly("cwes", &Finding::cwes)
        .def_readonly("evidence", &Finding::evidence)
        .def("__repr__", [](const Finding& f) {
            return std::string("<Finding ") + heuristic_name(f.heuristic) + " " + f.subject +
                   ">";
        });

    m.def(
        "run_heuristics",
        [](const CallGraph& g, const Clustering& c, const HeuristicConfig& cfg) {
            auto run = run_all_heuristics(g, c, cfg);
            py::dict counts;
            counts["bridging"] = run.counts.bridging;
            counts["hotspot"] = run.counts.hotspot;
            counts["dangling"] = run.counts.dangling;
            counts["hub"] = run.counts.hub;
            counts["weak"] = run.counts.weak;
            return py::make_tuple(run.findings, counts);
        },
        py::arg("graph"), py::arg("clustering"), py::arg("config") = HeuristicConfig{});

    m.def("export_top_k_dot", &export_top_k_dot, py::arg("graph"), py::arg("clustering"),
          py::arg("k") = 10);

    m.def(
        "analyze",
        [](const CallGraph& g, const py::kwargs& kwargs) {
            AnalysisResult result = run_analysis(g, config_from_kwargs(kwargs));
            py::dict out;
            out["report_json"] = render_json(result.report);
            out["report_markdown"] = render_markdown(result.report);
            out["clusterings"] = result.clusterings;
            out["warnings"] = result.warnings;
            out["finding_count"] = static_cast<int>(result.report.findings.size());
            return out;
        },
        py::arg("graph"),
        "Run the full pipeline; accepts algorithms, eps, min_pts, min_cluster_size, "
        "resolution, seed, top_k, node_cap, no_timing keyword options.");
}

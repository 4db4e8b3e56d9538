#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "callrisk/clustering.hpp"
#include "callrisk/graph.hpp"
#include "callrisk/heuristics.hpp"
#include "callrisk/report.hpp"

namespace callrisk {

struct RunConfig {
    std::string input_path;
    std::string input_format = "auto";  // dot | edgelist | auto
    std::vector<Algorithm> algorithms = {Algorithm::hdbscan, Algorithm::leiden};

    double eps = 1.0;           // dbscan
    int min_pts = 5;            // dbscan
    int min_cluster_size = 8;   // hdbscan
    double resolution = 1.0;    // louvain / leiden
    std::uint64_t seed = 42;

    HeuristicConfig heuristics;
    std::string out_dir = ".";
    std::vector<std::string> formats = {"json"};  // json | md | dot
    int top_k = 10;
    int node_cap = 5000;
    bool no_timing = false;

    void validate() const;  // throws ParameterError
};

struct AnalysisResult {
    AnalysisReport report;
    std::vector<Clustering> clusterings;  // parallel to report.runs
    std::vector<std::string> warnings;
};

// Runs every requested algorithm over the graph, scores each clustering
// (silhouette for density runs, modularity for community runs), applies the
// five heuristics to each, and assembles the report. Density algorithms pull
// a hop distance model on demand, subject to cfg.node_cap.
AnalysisResult run_analysis(const CallGraph& g, const RunConfig& cfg);

}  // namespace callrisk

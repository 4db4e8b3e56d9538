#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "callrisk/clustering.hpp"
#include "callrisk/graph.hpp"
#include "callrisk/heuristics.hpp"

namespace callrisk {

struct GraphStats {
    int nodes = 0;
    int edges = 0;
    std::int64_t total_weight = 0;

    bool operator==(const GraphStats&) const = default;
};

struct RunSummary {
    std::string algorithm;
    std::map<std::string, std::string> params;
    int cluster_count = 0;
    int noise_count = 0;
    std::string quality_metric;  // "silhouette" or "modularity"
    std::optional<double> quality;
    double elapsed_ms = 0.0;

    bool operator==(const RunSummary&) const = default;
};

struct ReportFinding {
    std::string run;  // algorithm of the run that produced it
    Finding finding;

    bool operator==(const ReportFinding& o) const;
};

/// Full record of one analysis: graph stats, per-algorithm run summaries,
/// ranked findings and the per-heuristic counts table.
struct AnalysisReport {
    GraphStats graph;
    std::vector<RunSummary> runs;
    std::vector<ReportFinding> findings;
    // heuristic -> run algorithm -> count; recomputable from findings.
    std::map<std::string, std::map<std::string, int>> heuristic_counts;
    std::string tool_version;
    std::map<std::string, std::string> config;  // flattened config snapshot

    bool operator==(const AnalysisReport&) const = default;

    // Rebuilds heuristic_counts from the findings list.
    void refresh_counts();
};

// Deterministic JSON: stable key order, floats at 6 significant digits,
// byte-identical output for identical reports. Non-finite scores render as
// the string "inf".
std::string render_json(const AnalysisReport& r);

// Inverse of render_json over the report schema.
AnalysisReport parse_report(const std::string& json_text);

// Human-readable report: graph summary, algorithm comparison table,
// heuristic counts table, top 3 findings per heuristic.
std::string render_markdown(const AnalysisReport& r);

// DOT export of the k largest non-noise clusters (ties to the lower cluster
// id): one subgraph per cluster, nodes colored by a palette cycling over
// cluster id, edges kept only between exported nodes. Self-loops are dropped.
std::string export_top_k_dot(const CallGraph& g, const Clustering& c, int k = 10);

// Rounds to 6 significant decimal digits; the float policy used by reports.
double round6(double x);

}  // namespace callrisk

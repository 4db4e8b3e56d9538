#include "callrisk/pipeline.hpp"

#include <chrono>
#include <optional>

#include "callrisk/community.hpp"
#include "callrisk/density.hpp"
#include "callrisk/distance.hpp"
#include "callrisk/errors.hpp"
#include "callrisk/version.hpp"

namespace callrisk {
namespace {

bool is_density(Algorithm a) { return a == Algorithm::dbscan || a == Algorithm::hdbscan; }

std::string format_double(double v) {
    std::string s = std::to_string(v);
    // std::to_string pads with zeros; trim them for readable params/config.
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        auto last = s.find_last_not_of('0');
        s.erase(last == dot ? dot : last + 1);
    }
    return s;
}

}  // namespace

void RunConfig::validate() const {
    if (algorithms.empty()) throw ParameterError("at least one algorithm is required");
    if (formats.empty()) throw ParameterError("at least one output format is required");
    for (const auto& f : formats)
        if (f != "json" && f != "md" && f != "dot")
            throw ParameterError("unknown output format: " + f + " (expected json, md or dot)");
    if (eps <= 0.0) throw ParameterError("eps must be positive");
    if (min_pts < 1) throw ParameterError("min-pts must be >= 1");
    if (min_cluster_size < 2) throw ParameterError("min-cluster-size must be >= 2");
    if (resolution <= 0.0) throw ParameterError("resolution must be positive");
    if (top_k < 1) throw ParameterError("top-k must be >= 1");
    if (node_cap < 1) throw ParameterError("node-cap must be >= 1");
    heuristics.validate();
}

AnalysisResult run_analysis(const CallGraph& g, const RunConfig& cfg) {
    cfg.validate();
    AnalysisResult result;
    result.report.tool_version = kVersion;
    result.report.graph = {g.node_count(), g.edge_count(), g.total_weight()};

    auto& config = result.report.config;
    config["input"] = cfg.input_path;
    std::string algos;
    for (const auto& a : cfg.algorithms) algos += (algos.empty() ? "" : ",") + std::string(algorithm_name(a));
    config["algorithms"] = algos;
    config["eps"] = format_double(cfg.eps);
    config["min_pts"] = std::to_string(cfg.min_pts);
    config["min_cluster_size"] = std::to_string(cfg.min_cluster_size);
    config["resolution"] = format_double(cfg.resolution);
    config["seed"] = std::to_string(cfg.seed);
    config["top_k"] = std::to_string(cfg.top_k);
    config["node_cap"] = std::to_string(cfg.node_cap);
    config["bridging.max_cluster_size"] = std::to_string(cfg.heuristics.bridging_max_cluster_size);
    config["bridging.min_neighbor_clusters"] =
        std::to_string(cfg.heuristics.bridging_min_neighbor_clusters);
    config["hotspot.min_incoming_zscore"] =
        format_double(cfg.heuristics.hotspot_min_incoming_zscore);
    config["hub.min_degree_zscore"] = format_double(cfg.heuristics.hub_min_degree_zscore);
    config["hub.min_cluster_spread"] = std::to_string(cfg.heuristics.hub_min_cluster_spread);
    config["weak.min_ratio"] = format_double(cfg.heuristics.weak_min_ratio);

    // Built lazily: only density algorithms need the dense matrix.
    std::optional<DistanceModel> dm;
    std::optional<UndirectedView> view;

    for (Algorithm algo : cfg.algorithms) {
        auto start = std::chrono::steady_clock::now();
        Clustering clustering;
        std::optional<double> quality;
        if (is_density(algo)) {
            if (!dm) dm = hop_distance_model(g, cfg.node_cap);
            clustering = algo == Algorithm::dbscan ? dbscan(*dm, cfg.eps, cfg.min_pts)
                                                   : hdbscan(*dm, cfg.min_cluster_size);
            try {
                quality = silhouette(*dm, clustering);
            } catch (const UndefinedScoreError& e) {
                result.warnings.push_back(std::string(algorithm_name(algo)) +
                                          ": silhouette undefined: " + e.what());
            }
        } else {
            if (!view) view = project_undirected(g);
            clustering = algo == Algorithm::louvain ? louvain(*view, cfg.resolution, cfg.seed)
                                                    : leiden(*view, cfg.resolution, cfg.seed);
            quality = clustering.quality;
        }
        auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        clustering.quality = quality;
        clustering.elapsed_ms = cfg.no_timing ? 0.0 : elapsed;

        auto heuristic_run = run_all_heuristics(g, clustering, cfg.heuristics);
        for (const auto& w : heuristic_run.warnings)
            result.warnings.push_back(std::string(algorithm_name(algo)) + ": " + w);

        RunSummary summary;
        summary.algorithm = algorithm_name(algo);
        summary.params = clustering.params;
        summary.cluster_count = clustering.cluster_count();
        summary.noise_count = clustering.noise_count();
        summary.quality_metric = is_density(algo) ? "silhouette" : "modularity";
        summary.quality = quality;
        summary.elapsed_ms = clustering.elapsed_ms;
        result.report.runs.push_back(std::move(summary));

        for (auto& f : heuristic_run.findings)
            result.report.findings.push_back({algorithm_name(algo), std::move(f)});
        result.clusterings.push_back(std::move(clustering));
    }
    result.report.refresh_counts();
    return result;
}

}  // namespace callrisk

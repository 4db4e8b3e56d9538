#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "callrisk/clustering.hpp"
#include "callrisk/graph.hpp"

namespace callrisk {

enum class Heuristic { bridging, hotspot, dangling, hub, weak };

const char* heuristic_name(Heuristic h);
const std::vector<std::string>& heuristic_cwes(Heuristic h);

/// Structural aggregate of one non-noise cluster. Weights come from folded
/// directed edges; self-loops are excluded; edges to noise nodes count as
/// external traffic but noise never forms a profile of its own.
struct ClusterProfile {
    int cluster_id = 0;
    int node_count = 0;
    std::int64_t internal_weight = 0;
    std::int64_t external_weight = 0;  // incoming + outgoing
    std::int64_t incoming_external = 0;
    std::int64_t outgoing_external = 0;
    int neighbor_clusters = 0;  // distinct non-noise cluster ids touched
    double external_internal_ratio = 0.0;  // +inf sentinel when internal == 0
};

struct Finding {
    Heuristic heuristic = Heuristic::bridging;
    bool node_subject = false;  // false: cluster subject
    std::string subject;        // node id, or decimal cluster id
    double score = 0.0;
    int rank = 0;  // 1-based within its heuristic
    std::vector<std::string> cwes;
    std::map<std::string, double> evidence;
};

struct HeuristicConfig {
    int bridging_max_cluster_size = 10;
    int bridging_min_neighbor_clusters = 3;
    double hotspot_min_incoming_zscore = 1.5;
    double hub_min_degree_zscore = 3.0;
    int hub_min_cluster_spread = 2;
    double weak_min_ratio = 1.0;

    void validate() const;  // all thresholds positive

    // key=value lines with '#' comments; keys exactly:
    //   bridging.max_cluster_size, bridging.min_neighbor_clusters,
    //   hotspot.min_incoming_zscore, hub.min_degree_zscore,
    //   hub.min_cluster_spread, weak.min_ratio
    static HeuristicConfig from_text(const std::string& text);
    static HeuristicConfig from_file(const std::string& path);
};

// Requires the clustering node order to match the graph's (ConsistencyError
// otherwise). Noise nodes get no profile but stay visible as external
// neighbors of the clusters they touch.
std::vector<ClusterProfile> profile_clusters(const CallGraph& g, const Clustering& c);

// Small clusters touching many other clusters (CWE-668). Score = neighbor
// cluster count.
std::vector<Finding> detect_bridging(const std::vector<ClusterProfile>& profiles,
                                     const HeuristicConfig& cfg);

// Clusters whose incoming external call weight exceeds
// mean + zscore * stddev over all clusters (CWE-284). Score = incoming weight.
std::vector<Finding> detect_hotspots(const std::vector<ClusterProfile>& profiles,
                                     const HeuristicConfig& cfg);

// Nodes whose entire neighborhood is one node in a different cluster
// (CWE-94, CWE-1164). Noise nodes are eligible.
std::vector<Finding> detect_dangling(const CallGraph& g, const Clustering& c);

// Nodes whose connection count exceeds mean + zscore * stddev and whose
// neighbors span at least min_cluster_spread clusters (CWE-20).
std::vector<Finding> detect_hubs(const CallGraph& g, const Clustering& c,
                                 const HeuristicConfig& cfg);

// Clusters leaking more traffic than they keep: ratio >= min_ratio, with the
// +inf sentinel flagging whenever at least one external edge exists (CWE-200).
std::vector<Finding> detect_weak_clusters(const std::vector<ClusterProfile>& profiles,
                                          const HeuristicConfig& cfg);

struct HeuristicCounts {
    int bridging = 0;
    int hotspot = 0;
    int dangling = 0;
    int hub = 0;
    int weak = 0;

    int total() const { return bridging + hotspot + dangling + hub + weak; }
    int for_heuristic(Heuristic h) const;
};

struct HeuristicRun {
    std::vector<Finding> findings;  // grouped by heuristic, ranked within each
    HeuristicCounts counts;
    std::vector<std::string> warnings;
};

HeuristicRun run_all_heuristics(const CallGraph& g, const Clustering& c,
                                const HeuristicConfig& cfg);

}  // namespace callrisk

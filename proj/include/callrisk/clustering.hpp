#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace callrisk {

enum class Algorithm { dbscan, hdbscan, louvain, leiden };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);  // throws ParameterError

/// Assignment of every node to a cluster label. -1 marks noise; non-noise
/// labels are contiguous 0..C-1. Community algorithms never emit -1.
struct Clustering {
    std::vector<std::string> node_order;
    std::vector<int> labels;
    Algorithm algorithm = Algorithm::dbscan;
    std::map<std::string, std::string> params;
    std::optional<double> quality;  // silhouette or modularity
    double elapsed_ms = 0.0;

    // Modularity before/after each outer iteration, for the community
    // algorithms. Not serialized.
    std::vector<double> iteration_quality;

    int cluster_count() const;
    int noise_count() const;

    // Members per cluster id, in node order.
    std::vector<std::vector<int>> cluster_members() const;
};

// Renumbers non-noise labels by first occurrence in node order so they form
// a contiguous 0..C-1 range. Noise stays -1.
void normalize_labels(std::vector<int>& labels);

// Stable JSON document:
// {algorithm, params, labels: [{node, cluster}], quality, elapsed_ms}
// with label entries sorted lexicographically by node id.
std::string clustering_to_json(const Clustering& c);

}  // namespace callrisk

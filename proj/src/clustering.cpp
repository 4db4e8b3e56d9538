#include "callrisk/clustering.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "callrisk/errors.hpp"
#include "callrisk/report.hpp"

namespace callrisk {

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::dbscan: return "dbscan";
        case Algorithm::hdbscan: return "hdbscan";
        case Algorithm::louvain: return "louvain";
        case Algorithm::leiden: return "leiden";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "dbscan") return Algorithm::dbscan;
    if (name == "hdbscan") return Algorithm::hdbscan;
    if (name == "louvain") return Algorithm::louvain;
    if (name == "leiden") return Algorithm::leiden;
    throw ParameterError("unknown algorithm: '" + name +
                         "' (expected dbscan, hdbscan, louvain or leiden)");
}

int Clustering::cluster_count() const {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    return max_label + 1;
}

int Clustering::noise_count() const {
    return static_cast<int>(std::count(labels.begin(), labels.end(), -1));
}

std::vector<std::vector<int>> Clustering::cluster_members() const {
    std::vector<std::vector<int>> members(cluster_count());
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
        if (labels[i] >= 0) members[labels[i]].push_back(i);
    return members;
}

void normalize_labels(std::vector<int>& labels) {
    std::vector<int> remap;
    int next = 0;
    for (int& l : labels) {
        if (l < 0) {
            l = -1;
            continue;
        }
        if (l >= static_cast<int>(remap.size())) remap.resize(l + 1, -1);
        if (remap[l] < 0) remap[l] = next++;
        l = remap[l];
    }
}

std::string clustering_to_json(const Clustering& c) {
    nlohmann::ordered_json doc;
    doc["algorithm"] = algorithm_name(c.algorithm);
    doc["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.params) doc["params"][k] = v;

    std::vector<int> order(c.node_order.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return c.node_order[a] < c.node_order[b]; });
    auto labels = nlohmann::ordered_json::array();
    for (int i : order)
        labels.push_back({{"node", c.node_order[i]}, {"cluster", c.labels[i]}});
    doc["labels"] = std::move(labels);
    if (c.quality)
        doc["quality"] = round6(*c.quality);
    else
        doc["quality"] = nullptr;
    doc["elapsed_ms"] = round6(c.elapsed_ms);
    return doc.dump(2) + "\n";
}

}  // namespace callrisk

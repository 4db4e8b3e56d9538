#pragma once

#include <cstdint>
#include <vector>

#include "callrisk/clustering.hpp"
#include "callrisk/graph.hpp"

namespace callrisk {

/// Community labels (0..C-1, no noise) plus per-community aggregates that
/// stay consistent with the labels.
struct Partition {
    std::vector<int> labels;
    std::vector<double> internal_weight;  // per community, each edge once
    std::vector<double> total_degree;     // per community, sum of strengths

    int community_count() const { return static_cast<int>(internal_weight.size()); }

    static Partition from_labels(const UndirectedView& g, const std::vector<int>& labels);
    static Partition singletons(const UndirectedView& g);
};

// Q = (1/2m) sum_ij (A_ij - gamma * k_i k_j / 2m) delta(c_i, c_j), evaluated
// through the partition aggregates. Throws UndefinedScoreError on an edgeless
// graph.
double modularity(const UndirectedView& g, const Partition& p, double resolution = 1.0);

// Louvain: seeded local moving sweeps + aggregation until no move improves Q
// by more than 1e-7 (at most 100 levels).
Clustering louvain(const UndirectedView& g, double resolution = 1.0, std::uint64_t seed = 42);

// Leiden: fast local move, refinement into internally connected
// subcommunities, aggregation constrained to the unrefined assignment.
// Every returned community is connected in its induced subgraph.
Clustering leiden(const UndirectedView& g, double resolution = 1.0, std::uint64_t seed = 42);

// The Leiden refinement step on its own: splits each community of `labels`
// into internally connected, well-linked subcommunities grown from
// singletons. Exposed for tests.
std::vector<int> refine_partition(const UndirectedView& g, const std::vector<int>& labels,
                                  double resolution, std::uint64_t seed);

// Ids of communities whose induced subgraph has more than one connected
// component. Empty means all communities are internally connected.
std::vector<int> check_connectivity(const UndirectedView& g, const Partition& p);

}  // namespace callrisk

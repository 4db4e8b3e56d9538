#pragma once

#include <vector>

#include "callrisk/clustering.hpp"
#include "callrisk/distance.hpp"

namespace callrisk {

// Classic DBSCAN over a precomputed distance model. A node is core iff at
// least min_pts nodes (itself included) lie within eps. Clusters are the
// connected components of core nodes under <=eps reachability; border nodes
// join the cluster of their first core neighbor in node order.
Clustering dbscan(const DistanceModel& dm, double eps, int min_pts);

// Distance from each node to its k-th nearest other node (self excluded).
// Requires k < node count.
std::vector<double> core_distances(const DistanceModel& dm, int k);

// mr(a,b) = max(core_k(a), core_k(b), d(a,b)); diagonal stays 0.
DistanceModel mutual_reachability(const DistanceModel& dm, int k);

struct CondensedTreeNode {
    int id = 0;
    int parent = -1;  // -1 for the root
    double birth_lambda = 0.0;
    double death_lambda = 0.0;
    int member_count = 0;  // members at birth
    double stability = 0.0;
    bool selected = false;
};

// HDBSCAN: mutual reachability -> MST -> single-linkage dendrogram ->
// condensed tree (splits kept only when both sides >= min_cluster_size) ->
// excess-of-mass cluster selection. k = 0 picks the default
// min(min_cluster_size, n-1). Fewer nodes than min_cluster_size yields
// all-noise, not an error.
Clustering hdbscan(const DistanceModel& dm, int min_cluster_size, int k = 0);

// The condensed hierarchy behind hdbscan(), for inspection and tests.
std::vector<CondensedTreeNode> hdbscan_condensed_tree(const DistanceModel& dm,
                                                      int min_cluster_size, int k = 0);

// Mean silhouette (b-a)/max(a,b) over non-noise points. Singleton-cluster
// points score 0. Throws UndefinedScoreError with fewer than two non-noise
// clusters.
double silhouette(const DistanceModel& dm, const Clustering& c);

// Kept with the density module: the MST edges over the mutual reachability
// matrix, sorted ascending. Exposed for oracle checks.
struct MstEdge {
    int u, v;
    double w;
};
std::vector<MstEdge> mutual_reachability_mst(const DistanceModel& dm, int k);

}  // namespace callrisk

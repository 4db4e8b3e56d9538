#include "callrisk/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "callrisk/errors.hpp"

namespace callrisk {
namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

}  // namespace

Clustering dbscan(const DistanceModel& dm, double eps, int min_pts) {
    if (dm.size() == 0) throw Error("dbscan requires a non-empty distance model");
    if (eps <= 0.0) throw ParameterError("eps must be positive");
    if (min_pts < 1) throw ParameterError("min_pts must be >= 1");
    const int n = dm.size();

    std::vector<char> core(n, 0);
    for (int i = 0; i < n; ++i) {
        const double* row = dm.row(i);
        int within = 0;
        for (int j = 0; j < n; ++j)
            if (row[j] <= eps) ++within;  // j == i counts: d(i,i) = 0
        core[i] = within >= min_pts;
    }

    // Clusters = connected components of core nodes under <=eps reachability.
    UnionFind uf(n);
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const double* row = dm.row(i);
        for (int j = i + 1; j < n; ++j)
            if (core[j] && row[j] <= eps) uf.unite(i, j);
    }

    std::vector<int> labels(n, -1);
    int next_label = 0;
    std::vector<int> root_label(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        int root = uf.find(i);
        if (root_label[root] < 0) root_label[root] = next_label++;
        labels[i] = root_label[root];
    }
    // Border points take the cluster of their first core neighbor in node
    // order; everything else stays noise.
    for (int i = 0; i < n; ++i) {
        if (core[i]) continue;
        const double* row = dm.row(i);
        for (int j = 0; j < n; ++j) {
            if (j == i || !core[j]) continue;
            if (row[j] <= eps) {
                labels[i] = labels[j];
                break;
            }
        }
    }

    Clustering result;
    result.node_order = dm.node_ids();
    result.labels = std::move(labels);
    normalize_labels(result.labels);
    result.algorithm = Algorithm::dbscan;
    result.params = {{"eps", std::to_string(eps)}, {"min_pts", std::to_string(min_pts)}};
    return result;
}

std::vector<double> core_distances(const DistanceModel& dm, int k) {
    const int n = dm.size();
    if (k < 1) throw ParameterError("k must be >= 1");
    if (k >= n)
        throw ParameterError("k (" + std::to_string(k) + ") must be below the node count (" +
                             std::to_string(n) + ")");
    std::vector<double> cores(n);
    std::vector<double> others;
    others.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        others.clear();
        const double* row = dm.row(i);
        for (int j = 0; j < n; ++j)
            if (j != i) others.push_back(row[j]);
        std::nth_element(others.begin(), others.begin() + (k - 1), others.end());
        cores[i] = others[k - 1];
    }
    return cores;
}

DistanceModel mutual_reachability(const DistanceModel& dm, int k) {
    auto cores = core_distances(dm, k);
    const int n = dm.size();
    std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
    double max_entry = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = dm.row(i);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double mr = std::max({cores[i], cores[j], row[j]});
            values[static_cast<std::size_t>(i) * n + j] = mr;
            max_entry = std::max(max_entry, mr);
        }
    }
    return DistanceModel::from_dense(dm.node_ids(), std::move(values),
                                     std::max(max_entry, dm.sentinel()));
}

std::vector<MstEdge> mutual_reachability_mst(const DistanceModel& dm, int k) {
    const int n = dm.size();
    auto cores = core_distances(dm, k);

    // Prim over the implicit complete graph; mr entries are computed on the
    // fly so the n^2 matrix never materializes.
    std::vector<MstEdge> mst;
    if (n < 2) return mst;
    mst.reserve(n - 1);
    std::vector<char> in_tree(n, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<int> best_from(n, 0);
    in_tree[0] = 1;
    const double* row0 = dm.row(0);
    for (int j = 1; j < n; ++j) {
        best[j] = std::max({cores[0], cores[j], row0[j]});
        best_from[j] = 0;
    }
    for (int step = 1; step < n; ++step) {
        int pick = -1;
        double pick_w = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            if (best[j] < pick_w) {  // strict: ties keep the lowest index
                pick_w = best[j];
                pick = j;
            }
        }
        in_tree[pick] = 1;
        mst.push_back({best_from[pick], pick, pick_w});
        const double* row = dm.row(pick);
        for (int j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            double mr = std::max({cores[pick], cores[j], row[j]});
            if (mr < best[j]) {
                best[j] = mr;
                best_from[j] = pick;
            }
        }
    }
    std::sort(mst.begin(), mst.end(), [](const MstEdge& a, const MstEdge& b) {
        if (a.w != b.w) return a.w < b.w;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    return mst;
}

namespace {

// Single-linkage dendrogram node; leaves are 0..n-1, merges n..2n-2.
struct DendroNode {
    int left = -1;
    int right = -1;
    double dist = 0.0;
    int size = 1;
};

std::vector<DendroNode> build_dendrogram(const std::vector<MstEdge>& mst, int n) {
    std::vector<DendroNode> nodes(2 * n - 1);
    UnionFind uf(2 * n - 1);
    std::vector<int> rep(2 * n - 1);  // component root -> dendrogram node
    std::iota(rep.begin(), rep.end(), 0);
    int next = n;
    for (const auto& e : mst) {
        int ru = uf.find(e.u);
        int rv = uf.find(e.v);
        auto& node = nodes[next];
        node.left = rep[ru];
        node.right = rep[rv];
        node.dist = e.w;
        node.size = nodes[node.left].size + nodes[node.right].size;
        uf.unite(ru, rv);
        rep[uf.find(ru)] = next;
        ++next;
    }
    return nodes;
}

struct CondensedCluster {
    int parent = -1;
    int dendro_birth = -1;  // dendrogram subtree at birth
    double birth_lambda = 0.0;
    double death_lambda = 0.0;
    int member_count = 0;
    double stability = 0.0;
    std::vector<int> children;
};

// Condensed tree: descend the dendrogram, splitting only where both sides
// carry at least min_cluster_size points; smaller sides fall out of the
// current cluster at that height's lambda.
std::vector<CondensedCluster> condense(const std::vector<DendroNode>& dendro, int n,
                                       int min_cluster_size) {
    // Lambda = 1/distance; zero distances map to a cap above every finite
    // lambda so their stability contribution stays bounded.
    double max_lambda = 0.0;
    for (int i = n; i < static_cast<int>(dendro.size()); ++i)
        if (dendro[i].dist > 0.0) max_lambda = std::max(max_lambda, 1.0 / dendro[i].dist);
    const double lambda_cap = max_lambda > 0.0 ? 2.0 * max_lambda : 1.0;
    auto lam = [&](double d) { return d > 0.0 ? 1.0 / d : lambda_cap; };

    std::vector<CondensedCluster> clusters;
    clusters.push_back({});  // root
    int root_dendro = static_cast<int>(dendro.size()) - 1;
    clusters[0].dendro_birth = root_dendro;
    clusters[0].birth_lambda = 0.0;
    clusters[0].member_count = dendro[root_dendro].size;

    struct Frame {
        int dendro_node;
        int cluster;
    };
    std::vector<Frame> stack{{root_dendro, 0}};
    while (!stack.empty()) {
        auto [node_id, cluster_id] = stack.back();
        stack.pop_back();
        int current = node_id;
        while (true) {
            const auto& node = dendro[current];
            if (node.left < 0) {  // single point: the cluster ends here
                clusters[cluster_id].death_lambda = lambda_cap;
                break;
            }
            double split_lambda = lam(node.dist);
            int ls = dendro[node.left].size;
            int rs = dendro[node.right].size;
            bool left_big = ls >= min_cluster_size;
            bool right_big = rs >= min_cluster_size;
            auto& cl = clusters[cluster_id];
            if (left_big && right_big) {
                // True split: remaining members leave at this lambda.
                cl.stability += (split_lambda - cl.birth_lambda) * (ls + rs);
                cl.death_lambda = split_lambda;
                for (int side : {node.left, node.right}) {
                    int child_id = static_cast<int>(clusters.size());
                    clusters.push_back({});
                    auto& child = clusters[child_id];
                    child.parent = cluster_id;
                    child.dendro_birth = side;
                    child.birth_lambda = split_lambda;
                    child.member_count = dendro[side].size;
                    clusters[cluster_id].children.push_back(child_id);
                    stack.push_back({side, child_id});
                }
                break;
            }
            if (!left_big && !right_big) {
                // Everything falls out; the cluster dies without children.
                cl.stability += (split_lambda - cl.birth_lambda) * (ls + rs);
                cl.death_lambda = split_lambda;
                break;
            }
            int keep = left_big ? node.left : node.right;
            int drop = left_big ? node.right : node.left;
            cl.stability += (split_lambda - cl.birth_lambda) * dendro[drop].size;
            current = keep;
        }
    }
    return clusters;
}

// Excess-of-mass selection; stability ties go to the parent (fewer, larger
// clusters).
std::vector<char> select_clusters(std::vector<CondensedCluster>& clusters) {
    int m = static_cast<int>(clusters.size());
    std::vector<char> selected(m, 0);
    std::vector<double> subtree(m, 0.0);
    for (int c = m - 1; c >= 0; --c) {  //  children always follow parents
        if (clusters[c].children.empty()) {
            selected[c] = 1;
            subtree[c] = clusters[c].stability;
            continue;
        }
        double child_total = 0.0;
        for (int ch : clusters[c].children) child_total += subtree[ch];
        if (clusters[c].stability >= child_total) {
            selected[c] = 1;
            subtree[c] = clusters[c].stability;
        } else {
            subtree[c] = child_total;
        }
    }
    // Keep only the highest selected cluster on each root path.
    std::vector<char> shadowed(m, 0);
    for (int c = 0; c < m; ++c) {
        int p = clusters[c].parent;
        if (p >= 0) shadowed[c] = shadowed[p] | selected[p];
        if (shadowed[c]) selected[c] = 0;
    }
    return selected;
}

void collect_leaves(const std::vector<DendroNode>& dendro, int node_id, int n,
                    std::vector<int>& out) {
    std::vector<int> stack{node_id};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        if (cur < n) {
            out.push_back(cur);
            continue;
        }
        stack.push_back(dendro[cur].left);
        stack.push_back(dendro[cur].right);
    }
}

int effective_k(const DistanceModel& dm, int min_cluster_size, int k) {
    if (k == 0) return std::min(min_cluster_size, dm.size() - 1);
    if (k >= dm.size())
        throw ParameterError("k (" + std::to_string(k) + ") must be below the node count (" +
                             std::to_string(dm.size()) + ")");
    return k;
}

}  // namespace

Clustering hdbscan(const DistanceModel& dm, int min_cluster_size, int k) {
    if (dm.size() == 0) throw Error("hdbscan requires a non-empty distance model");
    if (min_cluster_size < 2) throw ParameterError("min_cluster_size must be >= 2");
    const int n = dm.size();

    Clustering result;
    result.node_order = dm.node_ids();
    result.labels.assign(n, -1);
    result.algorithm = Algorithm::hdbscan;
    result.params = {{"min_cluster_size", std::to_string(min_cluster_size)}};

    if (n < min_cluster_size) {
        result.params["k"] = "0";
        return result;  // too small to form any cluster: all noise
    }
    int keff = effective_k(dm, min_cluster_size, k);
    result.params["k"] = std::to_string(keff);

    auto mst = mutual_reachability_mst(dm, keff);
    auto dendro = build_dendrogram(mst, n);
    auto clusters = condense(dendro, n, min_cluster_size);
    auto selected = select_clusters(clusters);

    std::vector<int> members;
    int label = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (!selected[c]) continue;
        members.clear();
        collect_leaves(dendro, clusters[c].dendro_birth, n, members);
        for (int p : members) result.labels[p] = label;
        ++label;
    }
    normalize_labels(result.labels);
    return result;
}

std::vector<CondensedTreeNode> hdbscan_condensed_tree(const DistanceModel& dm,
                                                      int min_cluster_size, int k) {
    if (dm.size() == 0) throw Error("hdbscan requires a non-empty distance model");
    if (min_cluster_size < 2) throw ParameterError("min_cluster_size must be >= 2");
    const int n = dm.size();
    if (n < min_cluster_size) return {};
    int keff = effective_k(dm, min_cluster_size, k);
    auto mst = mutual_reachability_mst(dm, keff);
    auto dendro = build_dendrogram(mst, n);
    auto clusters = condense(dendro, n, min_cluster_size);
    auto selected = select_clusters(clusters);

    std::vector<CondensedTreeNode> out;
    out.reserve(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        out.push_back({static_cast<int>(c), clusters[c].parent, clusters[c].birth_lambda,
                       clusters[c].death_lambda, clusters[c].member_count,
                       clusters[c].stability, selected[c] != 0});
    }
    return out;
}

double silhouette(const DistanceModel& dm, const Clustering& c) {
    const int n = dm.size();
    if (static_cast<int>(c.labels.size()) != n)
        throw ConsistencyError("clustering does not match the distance model");
    int clusters = c.cluster_count();
    std::vector<int> sizes(clusters, 0);
    for (int l : c.labels)
        if (l >= 0) ++sizes[l];
    int nonempty = static_cast<int>(std::count_if(sizes.begin(), sizes.end(),
                                                  [](int s) { return s > 0; }));
    if (nonempty < 2)
        throw UndefinedScoreError(
            "silhouette needs at least two non-noise clusters, got " + std::to_string(nonempty));

    double total = 0.0;
    int included = 0;
    std::vector<double> sums(clusters);
    for (int i = 0; i < n; ++i) {
        int li = c.labels[i];
        if (li < 0) continue;
        ++included;
        if (sizes[li] == 1) continue;  // singleton scores 0
        std::fill(sums.begin(), sums.end(), 0.0);
        const double* row = dm.row(i);
        for (int j = 0; j < n; ++j) {
            int lj = c.labels[j];
            if (lj >= 0 && j != i) sums[lj] += row[j];
        }
        double a = sums[li] / (sizes[li] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int cl = 0; cl < clusters; ++cl) {
            if (cl == li || sizes[cl] == 0) continue;
            b = std::min(b, sums[cl] / sizes[cl]);
        }
        double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return included > 0 ? total / included : 0.0;
}

}  // namespace callrisk

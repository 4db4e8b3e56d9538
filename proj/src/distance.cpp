#include "callrisk/distance.hpp"

#include <cmath>
#include <queue>
#include <thread>

namespace callrisk {

DistanceModel DistanceModel::from_dense(std::vector<std::string> node_ids,
                                        std::vector<double> values, double sentinel) {
    int n = static_cast<int>(node_ids.size());
    if (values.size() != static_cast<std::size_t>(n) * n)
        throw ParameterError("distance matrix size does not match node count");
    if (sentinel <= 0.0 && n > 0) throw ParameterError("sentinel must be positive");
    for (int i = 0; i < n; ++i) {
        if (values[static_cast<std::size_t>(i) * n + i] != 0.0)
            throw ParameterError("distance matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j) {
            double d = values[static_cast<std::size_t>(i) * n + j];
            double dt = values[static_cast<std::size_t>(j) * n + i];
            if (d != dt) throw ParameterError("distance matrix must be symmetric");
            if (!(d >= 0.0) || std::isnan(d))
                throw ParameterError("distances must be non-negative");
            if (d > sentinel)
                throw ParameterError("finite distances must not exceed the sentinel");
        }
    }
    DistanceModel dm;
    dm.node_ids_ = std::move(node_ids);
    dm.values_ = std::move(values);
    dm.n_ = n;
    dm.sentinel_ = sentinel;
    return dm;
}

DistanceModel hop_distance_model(const CallGraph& g, int node_cap) {
    int n = g.node_count();
    if (node_cap < 1) throw ParameterError("node_cap must be >= 1");
    if (n > node_cap)
        throw CapacityError("graph has " + std::to_string(n) +
                            " nodes, above the distance-model cap of " +
                            std::to_string(node_cap) +
                            "; raise --node-cap or subsample the graph");

    UndirectedView view = project_undirected(g);
    DistanceModel dm;
    dm.n_ = n;
    dm.sentinel_ = static_cast<double>(n);
    dm.node_ids_ = view.node_ids;
    dm.values_.assign(static_cast<std::size_t>(n) * n, dm.sentinel_);

    auto bfs_rows = [&](int begin, int end) {
        std::vector<int> dist(n);
        std::vector<int> queue(n);
        for (int src = begin; src < end; ++src) {
            std::fill(dist.begin(), dist.end(), -1);
            int head = 0, tail = 0;
            dist[src] = 0;
            queue[tail++] = src;
            while (head < tail) {
                int u = queue[head++];
                for (const auto& [v, w] : view.adj[u]) {
                    (void)w;  // hops ignore weights
                    if (dist[v] < 0) {
                        dist[v] = dist[u] + 1;
                        queue[tail++] = v;
                    }
                }
            }
            double* row = dm.values_.data() + static_cast<std::size_t>(src) * n;
            for (int v = 0; v < n; ++v)
                if (dist[v] >= 0) row[v] = static_cast<double>(dist[v]);
        }
    };

    // Rows are independent, so per-source BFS parallelizes without affecting
    // the result.
    unsigned hw = std::thread::hardware_concurrency();
    int workers = n >= 512 ? static_cast<int>(std::min<unsigned>(hw ? hw : 1, 8)) : 1;
    if (workers <= 1) {
        bfs_rows(0, n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            int begin = w * chunk;
            int end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(bfs_rows, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    return dm;
}

}  // namespace callrisk

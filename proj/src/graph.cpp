#include "callrisk/graph.hpp"

#include <algorithm>

namespace callrisk {

int CallGraph::Builder::add_node(const std::string& id, const std::string& label) {
    if (id.empty()) throw Error("node id must be a non-empty string");
    auto it = index_.find(id);
    if (it != index_.end()) {
        if (!label.empty()) nodes_[it->second].label = label;
        return it->second;
    }
    int idx = static_cast<int>(nodes_.size());
    index_.emplace(id, idx);
    nodes_.push_back({id, derive_package(id), label.empty() ? id : label});
    return idx;
}

void CallGraph::Builder::add_edge(const std::string& caller, const std::string& callee,
                                  std::int64_t weight) {
    if (weight < 1) throw Error("edge weight must be >= 1");
    int u = add_node(caller);
    int v = add_node(callee);
    std::int64_t key = (static_cast<std::int64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    auto it = edge_index_.find(key);
    if (it != edge_index_.end()) {
        edges_[it->second].weight += weight;
        return;
    }
    edge_index_.emplace(key, static_cast<int>(edges_.size()));
    edges_.push_back({u, v, weight});
}

void CallGraph::Builder::set_label(const std::string& id, const std::string& label) {
    int idx = add_node(id);
    if (!label.empty()) nodes_[idx].label = label;
}

CallGraph CallGraph::Builder::build() {
    CallGraph g;
    g.nodes_ = std::move(nodes_);
    g.edges_ = std::move(edges_);
    g.index_ = std::move(index_);
    g.out_edges_.resize(g.nodes_.size());
    g.in_edges_.resize(g.nodes_.size());
    for (int e = 0; e < static_cast<int>(g.edges_.size()); ++e) {
        const auto& edge = g.edges_[e];
        g.out_edges_[edge.caller].push_back(e);
        g.in_edges_[edge.callee].push_back(e);
        g.total_weight_ += edge.weight;
        if (edge.is_self_loop()) ++g.self_loop_count_;
    }
    return g;
}

bool CallGraph::operator==(const CallGraph& other) const {
    // Structural identity: node order is a representation detail.
    if (nodes_.size() != other.nodes_.size() || edges_.size() != other.edges_.size())
        return false;
    std::vector<std::string> ids_a, ids_b;
    ids_a.reserve(nodes_.size());
    ids_b.reserve(nodes_.size());
    for (const auto& n : nodes_) ids_a.push_back(n.id);
    for (const auto& n : other.nodes_) ids_b.push_back(n.id);
    std::sort(ids_a.begin(), ids_a.end());
    std::sort(ids_b.begin(), ids_b.end());
    if (ids_a != ids_b) return false;
    // Edge sets compared by id triple, order-insensitively.
    auto key = [](const CallGraph& g, const EdgeRecord& e) {
        return g.node_id(e.caller) + "\x1f" + g.node_id(e.callee);
    };
    std::vector<std::pair<std::string, std::int64_t>> a, b;
    a.reserve(edges_.size());
    b.reserve(edges_.size());
    for (const auto& e : edges_) a.emplace_back(key(*this, e), e.weight);
    for (const auto& e : other.edges_) b.emplace_back(key(other, e), e.weight);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

std::string derive_package(const std::string& id) {
    std::string s = id;
    // Strip method receiver wrappers: "(*pkg.T).M" / "(pkg.T).M".
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](char ch) { return ch == '(' || ch == ')' || ch == '*'; }),
            s.end());
    auto slash = s.rfind('/');
    std::size_t start = slash == std::string::npos ? 0 : slash + 1;
    auto dot = s.find('.', start);
    if (dot == std::string::npos) return "";
    return s.substr(0, dot);
}

UndirectedView project_undirected(const CallGraph& g) {
    UndirectedView view;
    int n = g.node_count();
    view.node_ids.reserve(n);
    for (const auto& node : g.nodes()) view.node_ids.push_back(node.id);
    view.adj.resize(n);
    view.strength.assign(n, 0.0);

    // Fold opposite directions: scan edges once, merging (min,max) pairs.
    std::unordered_map<std::int64_t, double> pair_weight;
    pair_weight.reserve(g.edges().size());
    for (const auto& e : g.edges()) {
        if (e.is_self_loop()) continue;
        int u = std::min(e.caller, e.callee);
        int v = std::max(e.caller, e.callee);
        pair_weight[(static_cast<std::int64_t>(u) << 32) | v] += static_cast<double>(e.weight);
    }
    for (const auto& [key, w] : pair_weight) {
        int u = static_cast<int>(key >> 32);
        int v = static_cast<int>(key & 0xffffffff);
        view.adj[u].emplace_back(v, w);
        view.adj[v].emplace_back(u, w);
        view.strength[u] += w;
        view.strength[v] += w;
        view.total_weight_2m += 2.0 * w;
    }
    // Deterministic neighbor order regardless of hash iteration.
    for (auto& neighbors : view.adj)
        std::sort(neighbors.begin(), neighbors.end());
    return view;
}

std::vector<NodeDegreeStats> degree_stats(const CallGraph& g) {
    std::vector<NodeDegreeStats> stats(g.node_count());
    for (const auto& e : g.edges()) {
        if (e.is_self_loop()) continue;
        auto& out = stats[e.caller];
        auto& in = stats[e.callee];
        out.out_degree += 1;
        out.out_weight += e.weight;
        in.in_degree += 1;
        in.in_weight += e.weight;
    }
    for (auto& s : stats) s.total_connections = s.in_degree + s.out_degree;
    return stats;
}

}  // namespace callrisk

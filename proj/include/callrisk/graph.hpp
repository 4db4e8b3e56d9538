#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "callrisk/errors.hpp"

namespace callrisk {

struct NodeRecord {
    std::string id;       // fully qualified function name, unique
    std::string package;  // derived from the id prefix, empty if underivable
    std::string label;    // display string, defaults to id
};

// Folded call edge. Parallel (caller, callee) pairs are merged and their
// multiplicity accumulated in weight.
struct EdgeRecord {
    int caller = -1;  // node index
    int callee = -1;  // node index
    std::int64_t weight = 1;

    bool is_self_loop() const { return caller == callee; }
};

/// Immutable directed call graph. Node order is first-appearance order.
class CallGraph {
public:
    class Builder;

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    const std::vector<EdgeRecord>& edges() const { return edges_; }

    const NodeRecord& node(int i) const { return nodes_[i]; }
    const std::string& node_id(int i) const { return nodes_[i].id; }

    // -1 if the id is unknown.
    int index_of(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? -1 : it->second;
    }

    int self_loop_count() const { return self_loop_count_; }
    std::int64_t total_weight() const { return total_weight_; }

    // Folded out/in edges per node, as indices into edges().
    const std::vector<std::vector<int>>& out_edges() const { return out_edges_; }
    const std::vector<std::vector<int>>& in_edges() const { return in_edges_; }

    bool operator==(const CallGraph& other) const;

private:
    friend class Builder;
    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> out_edges_;
    std::vector<std::vector<int>> in_edges_;
    int self_loop_count_ = 0;
    std::int64_t total_weight_ = 0;
};

class CallGraph::Builder {
public:
    // Returns the node index; registers the node on first mention.
    int add_node(const std::string& id, const std::string& label = "");

    // Folds duplicate (caller, callee) pairs by summing weights. weight >= 1.
    void add_edge(const std::string& caller, const std::string& callee,
                  std::int64_t weight = 1);

    void set_label(const std::string& id, const std::string& label);

    CallGraph build();

private:
    std::vector<NodeRecord> nodes_;
    std::unordered_map<std::string, int> index_;
    std::vector<EdgeRecord> edges_;
    std::unordered_map<std::int64_t, int> edge_index_;  // caller*2^32+callee -> edge
};

// Package prefix of a go-callvis style function name, "" if underivable.
// "github.com/acme/pkg.Func" -> "github.com/acme/pkg",
// "(*github.com/acme/pkg.T).M" -> "github.com/acme/pkg".
std::string derive_package(const std::string& id);

// Symmetric weighted projection of a CallGraph. Self-loops are dropped,
// opposite directions are summed: w(u,v) = w(u->v) + w(v->u).
struct UndirectedView {
    std::vector<std::string> node_ids;
    std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
    std::vector<double> strength;  // weighted degree k_i
    double total_weight_2m = 0.0;  // sum of all strengths = 2m

    int node_count() const { return static_cast<int>(node_ids.size()); }
};

UndirectedView project_undirected(const CallGraph& g);

struct NodeDegreeStats {
    int in_degree = 0;   // folded in-edges
    int out_degree = 0;  // folded out-edges
    int total_connections = 0;
    std::int64_t in_weight = 0;
    std::int64_t out_weight = 0;
};

// Per-node degree record in graph node order. Self-loops excluded.
std::vector<NodeDegreeStats> degree_stats(const CallGraph& g);

}  // namespace callrisk

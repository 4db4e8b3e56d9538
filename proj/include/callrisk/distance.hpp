#pragma once

#include <string>
#include <vector>

#include "callrisk/errors.hpp"
#include "callrisk/graph.hpp"

namespace callrisk {

// Dense symmetric pairwise distance matrix over a fixed node order.
// Disconnected pairs carry exactly `sentinel`; every finite entry <= sentinel.
class DistanceModel {
public:
    DistanceModel() = default;

    // Validates symmetry, zero diagonal, non-negativity and the sentinel bound.
    static DistanceModel from_dense(std::vector<std::string> node_ids,
                                    std::vector<double> values, double sentinel);

    int size() const { return n_; }
    double sentinel() const { return sentinel_; }
    const std::vector<std::string>& node_ids() const { return node_ids_; }

    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * n_ + j]; }
    const double* row(int i) const { return values_.data() + static_cast<std::size_t>(i) * n_; }

private:
    friend DistanceModel hop_distance_model(const CallGraph&, int);
    std::vector<std::string> node_ids_;
    std::vector<double> values_;  // n*n row-major
    int n_ = 0;
    double sentinel_ = 0.0;
};

// Minimum undirected hop count between every node pair; unreachable pairs get
// the sentinel n (strictly above any possible hop distance). Throws
// CapacityError when node count exceeds node_cap, which guards the O(n^2)
// matrix allocation.
DistanceModel hop_distance_model(const CallGraph& g, int node_cap = 5000);

}  // namespace callrisk

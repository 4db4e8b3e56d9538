// Hand-built graphs with known heuristic outcomes.
#pragma once

#include <string>
#include <vector>

#include "callrisk/clustering.hpp"
#include "callrisk/graph.hpp"

namespace testsupport {

struct PlantedFixture {
    callrisk::CallGraph graph;
    callrisk::Clustering clustering;
    // Expected top subjects per heuristic.
    std::string bridging_cluster;
    std::string hotspot_cluster;
    std::string dangling_node;
    std::string hub_node;
    std::string weak_cluster;
};

// One instance of every pattern against four solid K12 blocks:
//   cluster 4 "B"  - 4-node clique touching all four blocks (bridging)
//   cluster 6 "H"  - heavy clique absorbing weight-30 inbound traffic (hotspot)
//   node "d"       - single edge into a foreign block (dangling)
//   node "h"       - 23 connections across 4 blocks (hub)
//   cluster 5 "W"  - 1 internal vs 30 external weight (weak)
// Margins against the default thresholds are wide; every block is larger
// than the default bridging size cap so only B qualifies as small.
inline PlantedFixture planted_threats() {
    callrisk::CallGraph::Builder b;
    auto block_node = [](int block, int i) {
        return "a" + std::to_string(block) + "_" + std::to_string(i);
    };
    std::vector<std::string> order;
    std::vector<int> labels;
    auto add = [&](const std::string& id, int label) {
        order.push_back(id);
        labels.push_back(label);
    };

    for (int block = 0; block < 4; ++block)
        for (int i = 0; i < 12; ++i) add(block_node(block, i), block);
    for (int i = 0; i < 4; ++i) add("b" + std::to_string(i), 4);
    add("w0", 5);
    add("w1", 5);
    for (int i = 0; i < 6; ++i) add("h" + std::to_string(i), 6);
    add("d", 0);
    add("h", 2);
    for (const auto& id : order) b.add_node(id);

    // Four K12 blocks.
    for (int block = 0; block < 4; ++block)
        for (int i = 0; i < 12; ++i)
            for (int j = i + 1; j < 12; ++j) b.add_edge(block_node(block, i), block_node(block, j));
    // B: K4 bridging into every block.
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            b.add_edge("b" + std::to_string(i), "b" + std::to_string(j));
    for (int i = 0; i < 4; ++i) b.add_edge("b" + std::to_string(i), block_node(i, 0));
    // W -> H: one internal edge, weight-30 external stream.
    b.add_edge("w0", "w1");
    for (int i = 0; i < 5; ++i) {
        b.add_edge("w0", "h" + std::to_string(i), 3);
        b.add_edge("w1", "h" + std::to_string(i), 3);
    }
    // H: K6 at weight 3 keeps its internal weight above the inbound stream.
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            b.add_edge("h" + std::to_string(i), "h" + std::to_string(j), 3);
    // d: dangling out of block 0 into block 1.
    b.add_edge("d", block_node(1, 1));
    // h: hub inside block 2, fanning out to six nodes in each other block.
    for (int i = 1; i <= 5; ++i) b.add_edge("h", block_node(2, i));
    for (int block : {0, 1, 3})
        for (int i = 1; i <= 6; ++i) b.add_edge("h", block_node(block, i));

    PlantedFixture fx;
    fx.graph = b.build();
    fx.clustering.node_order = order;
    fx.clustering.labels = labels;
    fx.clustering.algorithm = callrisk::Algorithm::leiden;
    fx.bridging_cluster = "4";
    fx.hotspot_cluster = "6";
    fx.dangling_node = "d";
    fx.hub_node = "h";
    fx.weak_cluster = "5";
    return fx;
}

struct CleanFixture {
    callrisk::CallGraph graph;
    callrisk::Clustering clustering;
};

// Four K8 blocks chained by three single edges: no heuristic fires under the
// default thresholds.
inline CleanFixture clean_blocks() {
    callrisk::CallGraph::Builder b;
    auto node = [](int block, int i) {
        return "c" + std::to_string(block) + "_" + std::to_string(i);
    };
    std::vector<std::string> order;
    std::vector<int> labels;
    for (int block = 0; block < 4; ++block)
        for (int i = 0; i < 8; ++i) {
            order.push_back(node(block, i));
            labels.push_back(block);
        }
    for (const auto& id : order) b.add_node(id);
    for (int block = 0; block < 4; ++block)
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) b.add_edge(node(block, i), node(block, j));
    for (int block = 0; block < 3; ++block) b.add_edge(node(block, 7), node(block + 1, 0));

    CleanFixture fx;
    fx.graph = b.build();
    fx.clustering.node_order = order;
    fx.clustering.labels = labels;
    fx.clustering.algorithm = callrisk::Algorithm::leiden;
    return fx;
}

}  // namespace testsupport

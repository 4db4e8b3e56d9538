#include <doctest.h>

#include <random>

#include "callrisk/community.hpp"
#include "callrisk/errors.hpp"
#include "callrisk/io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace callrisk;

namespace {

UndirectedView view_of(const std::string& edge_list) {
    return project_undirected(parse_edge_list(edge_list));
}

// Two triangles joined by one bridge edge; optimum Q = 5/14.
const char* kTwoTrianglesBridge = "a b\nb c\nc a\nd e\ne f\nf d\nc d\n";

std::vector<int> labels_for(const UndirectedView& g, const Clustering& c) { return c.labels; }

bool same_blocks(const std::vector<int>& labels, int block_size) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != labels[(i / block_size) * block_size]) return false;
    return true;
}

}  // namespace

TEST_CASE("modularity of the whole-graph community is zero") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 5; ++trial) {
        auto g = project_undirected(testsupport::random_undirected_graph(12, 0.4, rng));
        if (g.total_weight_2m == 0.0) continue;
        std::vector<int> labels(g.node_count(), 0);
        CHECK(modularity(g, Partition::from_labels(g, labels)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("two disjoint triangles each in a community score 0.5") {
    auto g = view_of("a b\nb c\nc a\nd e\ne f\nf d\n");
    std::vector<int> labels = {0, 0, 0, 1, 1, 1};
    CHECK(modularity(g, Partition::from_labels(g, labels)) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a single edge between singleton communities scores -0.5") {
    auto g = view_of("a b\n");
    std::vector<int> labels = {0, 1};
    CHECK(modularity(g, Partition::from_labels(g, labels)) ==
          doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("modularity is undefined on an edgeless graph") {
    CallGraph::Builder b;
    b.add_node("a");
    b.add_node("b");
    auto g = project_undirected(b.build());
    CHECK_THROWS_AS(modularity(g, Partition::from_labels(g, {0, 1})), UndefinedScoreError);
    CHECK_THROWS_AS(louvain(g), UndefinedScoreError);
    CHECK_THROWS_AS(leiden(g), UndefinedScoreError);
}

TEST_CASE("aggregate modularity equals the naive double sum") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 4 + static_cast<int>(rng() % 61);
        auto g = project_undirected(testsupport::random_undirected_graph(n, 0.15, rng));
        if (g.total_weight_2m == 0.0) continue;
        std::vector<int> labels(n);
        int communities = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) labels[i] = static_cast<int>(rng() % communities);
        auto p = Partition::from_labels(g, labels);
        double fast = modularity(g, p);
        double slow = testsupport::naive_modularity(g, labels);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
        CHECK(fast >= -1.0);
        CHECK(fast <= 1.0);
    }
}

TEST_CASE("modularity is invariant under uniform weight scaling") {
    std::mt19937_64 rng(61);
    auto base = testsupport::random_undirected_graph(20, 0.3, rng);
    auto g = project_undirected(base);
    std::vector<int> labels(g.node_count());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
    double q1 = modularity(g, Partition::from_labels(g, labels));

    UndirectedView scaled = g;
    for (auto& neighbors : scaled.adj)
        for (auto& [v, w] : neighbors) w *= 7.0;
    for (auto& s : scaled.strength) s *= 7.0;
    scaled.total_weight_2m *= 7.0;
    double q2 = modularity(scaled, Partition::from_labels(scaled, labels));
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-9));
}

TEST_CASE("partition aggregates are recomputable") {
    std::mt19937_64 rng(67);
    auto g = project_undirected(testsupport::random_undirected_graph(25, 0.2, rng));
    std::vector<int> labels(g.node_count());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 4);
    auto p = Partition::from_labels(g, labels);
    double internal_total = 0.0, degree_total = 0.0;
    for (double w : p.internal_weight) internal_total += w;
    for (double d : p.total_degree) degree_total += d;
    CHECK(degree_total == doctest::Approx(g.total_weight_2m).epsilon(1e-9));
    double edge_total = 0.0;
    for (int u = 0; u < g.node_count(); ++u)
        for (const auto& [v, w] : g.adj[u])
            if (u < v && labels[u] == labels[v]) edge_total += w;
    CHECK(internal_total == doctest::Approx(edge_total).epsilon(1e-9));
}

TEST_CASE("louvain recovers the two-triangle optimum") {
    auto g = view_of(kTwoTrianglesBridge);
    auto c = louvain(g, 1.0, 42);
    REQUIRE(c.quality.has_value());
    CHECK(*c.quality == doctest::Approx(5.0 / 14.0).epsilon(1e-9));
    CHECK(testsupport::same_partition(c.labels, {0, 0, 0, 1, 1, 1}));
    // Exhaustive oracle confirms 5/14 is the optimum.
    auto best = testsupport::best_modularity_partition(g);
    CHECK(best.q == doctest::Approx(5.0 / 14.0).epsilon(1e-9));
}

TEST_CASE("louvain keeps disjoint cliques separate") {
    auto g = view_of("a b\na c\na d\nb c\nb d\nc d\nw x\nw y\nw z\nx y\nx z\ny z\n");
    auto c = louvain(g, 1.0, 7);
    CHECK(testsupport::same_partition(c.labels, {0, 0, 0, 0, 1, 1, 1, 1}));
    auto best = testsupport::best_modularity_partition(g);
    CHECK(*c.quality == doctest::Approx(best.q).epsilon(1e-9));
}

TEST_CASE("a single triangle collapses into one community") {
    auto g = view_of("a b\nb c\nc a\n");
    auto c = louvain(g, 1.0, 1);
    CHECK(c.cluster_count() == 1);
    CHECK(*c.quality == doctest::Approx(0.0).epsilon(1e-12));
    auto best = testsupport::best_modularity_partition(g);
    CHECK(best.q == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("louvain and leiden stay within the exhaustive optimum") {
    std::mt19937_64 rng(71);
    int tested = 0;
    while (tested < 25) {
        int n = 4 + static_cast<int>(rng() % 5);  // 4..8 nodes
        auto g = project_undirected(testsupport::random_undirected_graph(n, 0.5, rng));
        if (g.total_weight_2m == 0.0) continue;
        ++tested;
        auto best = testsupport::best_modularity_partition(g);
        for (std::uint64_t seed : {1ull, 2ull}) {
            auto lv = louvain(g, 1.0, seed);
            auto ld = leiden(g, 1.0, seed);
            CHECK(*lv.quality <= best.q + 1e-9);
            CHECK(*ld.quality <= best.q + 1e-9);
            // Both must beat the trivial singleton baseline.
            auto singles = Partition::singletons(g);
            double baseline = modularity(g, singles);
            CHECK(*lv.quality >= baseline - 1e-9);
            CHECK(*ld.quality >= baseline - 1e-9);
        }
    }
}

TEST_CASE("leiden matches louvain on the two-triangle fixture") {
    auto g = view_of(kTwoTrianglesBridge);
    auto c = leiden(g, 1.0, 42);
    CHECK(*c.quality == doctest::Approx(5.0 / 14.0).epsilon(1e-9));
    CHECK(testsupport::same_partition(c.labels, {0, 0, 0, 1, 1, 1}));
}

TEST_CASE("refinement splits an internally disconnected community") {
    auto g = view_of("a b\nc d\n");
    // Hand-built merged community over two components.
    auto refined = refine_partition(g, {0, 0, 0, 0}, 1.0, 42);
    CHECK(testsupport::same_partition(refined, {0, 0, 1, 1}));
}

TEST_CASE("leiden recovers a planted four-block structure") {
    std::mt19937_64 rng(12345);
    auto graph = testsupport::planted_partition_graph(4, 8, 0.9, 0.05, rng);
    auto g = project_undirected(graph);
    auto c = leiden(g, 1.0, 42);
    CHECK(c.cluster_count() == 4);
    CHECK(same_blocks(c.labels, 8));
}

TEST_CASE("leiden output always passes the connectivity check") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 10 + static_cast<int>(rng() % 80);
        double density = 0.02 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
        auto g = project_undirected(testsupport::random_undirected_graph(n, density, rng));
        if (g.total_weight_2m == 0.0) continue;
        auto c = leiden(g, 1.0, trial);
        auto p = Partition::from_labels(g, c.labels);
        CHECK(check_connectivity(g, p).empty());
    }
}

TEST_CASE("check_connectivity reports a hand-built split community") {
    auto g = view_of("a b\nc d\n");
    auto p = Partition::from_labels(g, {0, 0, 0, 0});
    auto bad = check_connectivity(g, p);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == 0);
}

TEST_CASE("singleton communities are never reported as disconnected") {
    auto g = view_of("a b\n");
    CallGraph::Builder b;
    b.add_edge("a", "b");
    b.add_node("lonely");
    auto g2 = project_undirected(b.build());
    auto p = Partition::from_labels(g2, {0, 0, 1});
    CHECK(check_connectivity(g2, p).empty());
}

TEST_CASE("community runs are deterministic for a fixed seed") {
    std::mt19937_64 rng(83);
    auto graph = testsupport::random_undirected_graph(60, 0.08, rng);
    auto g = project_undirected(graph);
    auto a1 = louvain(g, 1.0, 99);
    auto a2 = louvain(g, 1.0, 99);
    CHECK(a1.labels == a2.labels);
    auto b1 = leiden(g, 1.0, 99);
    auto b2 = leiden(g, 1.0, 99);
    CHECK(b1.labels == b2.labels);
}

TEST_CASE("modularity never decreases across outer iterations") {
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 10; ++trial) {
        auto graph = testsupport::planted_partition_graph(5, 10, 0.5, 0.05, rng);
        auto g = project_undirected(graph);
        for (const Clustering& c : {louvain(g, 1.0, trial), leiden(g, 1.0, trial)}) {
            for (std::size_t i = 1; i < c.iteration_quality.size(); ++i)
                CHECK(c.iteration_quality[i] >= c.iteration_quality[i - 1] - 1e-9);
        }
    }
}

TEST_CASE("resolution shifts community granularity without changing Q at 1") {
    auto g = view_of(kTwoTrianglesBridge);
    auto p = Partition::from_labels(g, {0, 0, 0, 1, 1, 1});
    // gamma = 1 reproduces the plain formula.
    CHECK(modularity(g, p, 1.0) == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    // Higher gamma penalizes the null model more.
    CHECK(modularity(g, p, 2.0) < modularity(g, p, 1.0));
}

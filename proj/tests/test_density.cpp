#include <doctest.h>

#include <random>

#include "callrisk/density.hpp"
#include "callrisk/errors.hpp"
#include "callrisk/io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace callrisk;
using testsupport::line_model;
using testsupport::make_ids;

namespace {

DistanceModel scaled(const DistanceModel& dm, double factor) {
    int n = dm.size();
    std::vector<double> values(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            values[static_cast<std::size_t>(i) * n + j] = dm.at(i, j) * factor;
    return DistanceModel::from_dense(dm.node_ids(), std::move(values), dm.sentinel() * factor);
}

}  // namespace

TEST_CASE("dbscan separates two line segments") {
    auto dm = line_model({0, 1, 2, 10, 11, 12});
    auto c = dbscan(dm, 1.5, 2);
    CHECK(c.cluster_count() == 2);
    CHECK(c.noise_count() == 0);
    CHECK(c.labels == std::vector<int>{0, 0, 0, 1, 1, 1});
    // Oracle agreement on the same fixture.
    auto oracle = testsupport::naive_dbscan(dm, 1.5, 2);
    CHECK(testsupport::same_partition(c.labels, oracle.labels));
}

TEST_CASE("dbscan flags everything as noise when eps is too tight") {
    auto dm = line_model({0, 1, 2, 10, 11, 12});
    auto c = dbscan(dm, 0.5, 2);
    CHECK(c.cluster_count() == 0);
    CHECK(c.noise_count() == 6);
}

TEST_CASE("a single node is its own core with min_pts 1") {
    auto dm = line_model({0});
    auto c = dbscan(dm, 1.0, 1);
    CHECK(c.labels == std::vector<int>{0});
}

TEST_CASE("dbscan rejects an empty model and bad params") {
    DistanceModel empty;
    CHECK_THROWS_AS(dbscan(empty, 1.0, 1), Error);
    auto dm = line_model({0, 1});
    CHECK_THROWS_AS(dbscan(dm, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(dbscan(dm, 1.0, 0), ParameterError);
}

TEST_CASE("dbscan equals the naive reference on random instances") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 5 + static_cast<int>(rng() % 60);
        auto dm = testsupport::random_model(n, rng);
        for (double eps : {0.5, 1.0, 2.0}) {
            for (int min_pts : {2, 5}) {
                auto fast = dbscan(dm, eps, min_pts);
                auto slow = testsupport::naive_dbscan(dm, eps, min_pts);
                CHECK(testsupport::same_partition(fast.labels, slow.labels));
            }
        }
    }
}

TEST_CASE("dbscan partition is stable under node permutation") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 12 + static_cast<int>(rng() % 20);
        auto dm = testsupport::random_model(n, rng);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);

        std::vector<double> values(static_cast<std::size_t>(n) * n);
        auto ids = make_ids(n, "p");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                values[static_cast<std::size_t>(i) * n + j] = dm.at(perm[i], perm[j]);
        auto permuted = DistanceModel::from_dense(ids, std::move(values), dm.sentinel());

        auto c1 = dbscan(dm, 1.0, 3);
        auto c2 = dbscan(permuted, 1.0, 3);
        std::vector<int> c2_unpermuted(n);
        for (int i = 0; i < n; ++i) c2_unpermuted[perm[i]] = c2.labels[i];
        CHECK(testsupport::same_partition(c1.labels, c2_unpermuted));
    }
}

TEST_CASE("core distances on the three-point line") {
    auto dm = line_model({0, 1, 3});
    auto cores = core_distances(dm, 2);
    CHECK(cores[0] == 3.0);
    CHECK(cores[1] == 2.0);
    CHECK(cores[2] == 3.0);
}

TEST_CASE("a duplicate twin gives core distance zero") {
    auto dm = line_model({5, 5, 9});
    auto cores = core_distances(dm, 1);
    CHECK(cores[0] == 0.0);
    CHECK(cores[1] == 0.0);
}

TEST_CASE("triangle hop cores are all one") {
    auto g = parse_edge_list("a b\nb c\nc a");
    auto dm = hop_distance_model(g);
    auto cores = core_distances(dm, 2);
    for (double c : cores) CHECK(c == 1.0);
}

TEST_CASE("core_distances rejects k >= n") {
    auto dm = line_model({0, 1, 3});
    CHECK_THROWS_AS(core_distances(dm, 3), ParameterError);
    CHECK_NOTHROW(core_distances(dm, 2));
}

TEST_CASE("mutual reachability on the three-point line") {
    auto dm = line_model({0, 1, 3});
    auto mr = mutual_reachability(dm, 2);
    CHECK(mr.at(0, 1) == 3.0);
    CHECK(mr.at(1, 2) == 3.0);
    CHECK(mr.at(0, 2) == 3.0);
    CHECK(mr.at(0, 0) == 0.0);
}

TEST_CASE("mutual reachability degenerates to d with all-duplicate points") {
    auto dm = line_model({2, 2, 2});
    auto mr = mutual_reachability(dm, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(mr.at(i, j) == dm.at(i, j));
}

TEST_CASE("mutual reachability dominates the base distance") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 6 + static_cast<int>(rng() % 30);
        auto dm = testsupport::random_model(n, rng);
        int k = 1 + static_cast<int>(rng() % (n - 1));
        auto cores = core_distances(dm, k);
        auto mr = mutual_reachability(dm, k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                CHECK(mr.at(i, j) >= dm.at(i, j));
                if (dm.at(i, j) >= cores[i] && dm.at(i, j) >= cores[j])
                    CHECK(mr.at(i, j) == dm.at(i, j));
            }
    }
}

TEST_CASE("hdbscan splits two well-separated blobs") {
    auto dm = testsupport::two_blob_model(10, 1.0, 10.0);
    auto c = hdbscan(dm, 5);
    CHECK(c.cluster_count() == 2);
    CHECK(c.noise_count() == 0);
    // Every blob lands in one cluster.
    for (int i = 1; i < 10; ++i) CHECK(c.labels[i] == c.labels[0]);
    for (int i = 11; i < 20; ++i) CHECK(c.labels[i] == c.labels[10]);
    CHECK(c.labels[0] != c.labels[10]);
}

TEST_CASE("the blob split matches single-linkage structure") {
    // Oracle: with intra-distance 1 and inter-distance 10, every mutual
    // reachability value is 1 inside a blob and 10 across, so single linkage
    // merges each blob fully before the final cross-blob edge.
    auto dm = testsupport::two_blob_model(10, 1.0, 10.0);
    auto mst = mutual_reachability_mst(dm, 5);
    REQUIRE(mst.size() == 19);
    int cross = 0;
    for (const auto& e : mst) {
        bool same = (e.u < 10) == (e.v < 10);
        if (!same) {
            ++cross;
            CHECK(e.w == 10.0);
        } else {
            CHECK(e.w == 1.0);
        }
    }
    CHECK(cross == 1);
}

TEST_CASE("uniform clique condenses to a single selected cluster") {
    auto dm = testsupport::two_blob_model(3, 1.0, 1.0);  // 6 nodes, all distances 1
    auto tree = hdbscan_condensed_tree(dm, 3);
    REQUIRE(tree.size() == 1);
    CHECK(tree[0].selected);
    CHECK(tree[0].member_count == 6);
    auto c = hdbscan(dm, 3);
    CHECK(c.cluster_count() == 1);
    CHECK(c.noise_count() == 0);
}

TEST_CASE("fewer nodes than min_cluster_size is all noise") {
    auto dm = line_model({0, 1, 2});
    auto c = hdbscan(dm, 8);
    CHECK(c.cluster_count() == 0);
    CHECK(c.noise_count() == 3);
    CHECK(c.labels == std::vector<int>{-1, -1, -1});
}

TEST_CASE("every hdbscan cluster reaches min_cluster_size") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 8 + static_cast<int>(rng() % 60);
        auto dm = testsupport::random_model(n, rng);
        int mcs = 2 + static_cast<int>(rng() % 6);
        auto c = hdbscan(dm, mcs);
        std::vector<int> sizes(c.cluster_count(), 0);
        for (int l : c.labels)
            if (l >= 0) ++sizes[l];
        for (int s : sizes) CHECK(s >= mcs);
    }
}

TEST_CASE("mst weight equals the Kruskal oracle") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 15; ++trial) {
        int n = 5 + static_cast<int>(rng() % 45);
        auto dm = testsupport::random_model(n, rng);
        int k = 1 + static_cast<int>(rng() % std::min(6, n - 1));
        auto mr = mutual_reachability(dm, k);
        auto mst = mutual_reachability_mst(dm, k);
        double total = 0.0;
        for (const auto& e : mst) total += e.w;
        CHECK(total == doctest::Approx(testsupport::kruskal_mst_weight(mr)).epsilon(1e-12));
    }
}

TEST_CASE("scaling distances leaves the hdbscan partition unchanged") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 10 + static_cast<int>(rng() % 40);
        auto dm = testsupport::random_model(n, rng);
        auto c1 = hdbscan(dm, 4);
        auto c2 = hdbscan(scaled(dm, 37.5), 4);
        CHECK(c1.labels == c2.labels);
    }
}

TEST_CASE("silhouette on the two-pair line fixture") {
    auto dm = line_model({0, 1, 10, 11});
    Clustering c;
    c.node_order = dm.node_ids();
    c.labels = {0, 0, 1, 1};
    double s = silhouette(dm, c);
    // Frozen from the direct formula: mean of 9.5/10.5, 8.5/9.5 and mirrors.
    CHECK(s == doctest::Approx(0.899749).epsilon(1e-6));
    CHECK(s == doctest::Approx(testsupport::naive_silhouette(dm, c.labels)).epsilon(1e-12));
}

TEST_CASE("silhouette is zero when a equals b") {
    // Two clusters of coincident points at the same spot: a = b = 0 for the
    // twin pair, defined as 0.
    auto dm = line_model({0, 0, 0, 0});
    Clustering c;
    c.node_order = dm.node_ids();
    c.labels = {0, 0, 1, 1};
    CHECK(silhouette(dm, c) == 0.0);
}

TEST_CASE("silhouette requires two clusters") {
    auto dm = line_model({0, 1, 2});
    Clustering c;
    c.node_order = dm.node_ids();
    c.labels = {0, 0, 0};
    CHECK_THROWS_AS(silhouette(dm, c), UndefinedScoreError);
}

TEST_CASE("silhouette matches the oracle on random clusterings") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 6 + static_cast<int>(rng() % 40);
        auto dm = testsupport::random_model(n, rng);
        int clusters = 2 + static_cast<int>(rng() % 4);
        Clustering c;
        c.node_order = dm.node_ids();
        c.labels.resize(n);
        for (int i = 0; i < n; ++i) {
            int l = static_cast<int>(rng() % (clusters + 1)) - 1;  // allow noise
            c.labels[i] = l;
        }
        normalize_labels(c.labels);
        std::vector<int> sizes(c.cluster_count(), 0);
        int nonempty = 0;
        for (int l : c.labels)
            if (l >= 0 && ++sizes[l] == 1) ++nonempty;
        if (nonempty < 2) continue;
        double got = silhouette(dm, c);
        double want = testsupport::naive_silhouette(dm, c.labels);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got >= -1.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("silhouette is scale invariant and rewards separation") {
    auto dm = testsupport::two_blob_model(5, 1.0, 9.0);
    Clustering c;
    c.node_order = dm.node_ids();
    c.labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    double s = silhouette(dm, c);
    CHECK(s > 0.5);
    CHECK(silhouette(scaled(dm, 123.0), c) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("hdbscan blob silhouette clears the separation bar") {
    auto dm = testsupport::two_blob_model(10, 1.0, 10.0);
    auto c = hdbscan(dm, 5);
    REQUIRE(c.cluster_count() == 2);
    CHECK(silhouette(dm, c) >= 0.5);
}

TEST_CASE("condensed tree nodes keep their invariants") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 10 + static_cast<int>(rng() % 40);
        auto dm = testsupport::random_model(n, rng);
        int mcs = 2 + static_cast<int>(rng() % 5);
        auto tree = hdbscan_condensed_tree(dm, mcs);
        REQUIRE(!tree.empty());
        for (const auto& node : tree) {
            CHECK(node.death_lambda >= node.birth_lambda);
            CHECK(node.member_count >= mcs);
            CHECK(node.stability >= 0.0);
            if (node.parent >= 0) CHECK(node.parent < node.id);
        }
    }
}

TEST_CASE("clustering serializes to the stable JSON schema") {
    auto dm = line_model({0, 1, 10});
    Clustering c;
    c.node_order = {"zeta", "alpha", "mid"};
    c.labels = {0, 0, -1};
    c.algorithm = Algorithm::dbscan;
    c.params = {{"eps", "1.5"}, {"min_pts", "2"}};
    c.quality = 0.75;
    c.elapsed_ms = 3.25;
    auto json = clustering_to_json(c);
    CHECK(json.find("\"algorithm\": \"dbscan\"") != std::string::npos);
    // Label entries sorted lexicographically by node id.
    auto alpha = json.find("alpha");
    auto mid = json.find("\"mid\"");
    auto zeta = json.find("zeta");
    CHECK(alpha < mid);
    CHECK(mid < zeta);
    CHECK(json.find("\"cluster\": -1") != std::string::npos);
    CHECK(clustering_to_json(c) == json);
}

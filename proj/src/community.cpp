#include "callrisk/community.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_map>

#include "callrisk/errors.hpp"

namespace callrisk {
namespace {

constexpr double kMinQGain = 1e-7;  // a move must improve Q by more than this
constexpr int kMaxLevels = 100;

// Working graph for one aggregation level. Unlike the public UndirectedView
// it carries self-loops (2x internal weight of the collapsed community).
struct LevelGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
    std::vector<double> self_loop;
    std::vector<double> strength;  // adj weights + self loop
    double two_m = 0.0;

    int n() const { return static_cast<int>(adj.size()); }
};

LevelGraph level_from_view(const UndirectedView& v) {
    LevelGraph g;
    g.adj = v.adj;
    g.self_loop.assign(v.node_count(), 0.0);
    g.strength = v.strength;
    g.two_m = v.total_weight_2m;
    return g;
}

// Deterministic Fisher-Yates; std::shuffle's output is
// implementation-defined, which would break cross-platform label stability.
void shuffle_ids(std::vector<int>& ids, std::mt19937_64& rng) {
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng() % i]);
}

double level_modularity(const LevelGraph& g, const std::vector<int>& comm, double gamma) {
    int c_count = 0;
    for (int c : comm) c_count = std::max(c_count, c + 1);
    std::vector<double> internal_x2(c_count, 0.0), tot(c_count, 0.0);
    for (int u = 0; u < g.n(); ++u) {
        tot[comm[u]] += g.strength[u];
        internal_x2[comm[u]] += g.self_loop[u];
        for (const auto& [v, w] : g.adj[u])
            if (comm[v] == comm[u]) internal_x2[comm[u]] += w;  // visits each edge twice
    }
    double q = 0.0;
    for (int c = 0; c < c_count; ++c) {
        double frac = tot[c] / g.two_m;
        q += internal_x2[c] / g.two_m - gamma * frac * frac;
    }
    return q;
}

// Scratch space for one node's neighbor-community weights.
struct MoveScratch {
    std::vector<double> weight_to;  // community -> edge weight from the node
    std::vector<int> touched;
};

// Best community for node v given current assignment; returns (community,
// raw gain difference vs staying). Raw gain G(c) = k_{v->c} - gamma * s_v *
// tot(c) / 2m relates to the true modularity delta by dQ = 2 * (G(c) -
// G(stay)) / 2m.
std::pair<int, double> best_community(const LevelGraph& g, int v, const std::vector<int>& comm,
                                      std::vector<double>& tot, MoveScratch& scratch,
                                      double gamma) {
    int old_c = comm[v];
    double s_v = g.strength[v];
    scratch.touched.clear();
    auto touch = [&](int c) {
        if (scratch.weight_to[c] < 0.0) {
            scratch.weight_to[c] = 0.0;
            scratch.touched.push_back(c);
        }
    };
    touch(old_c);
    for (const auto& [u, w] : g.adj[v]) {
        touch(comm[u]);
        scratch.weight_to[comm[u]] += w;
    }
    tot[old_c] -= s_v;  // evaluate moves with v lifted out
    double stay_gain = scratch.weight_to[old_c] - gamma * s_v * tot[old_c] / g.two_m;
    int best_c = old_c;
    double best_gain = stay_gain;
    for (int c : scratch.touched) {
        if (c == old_c) continue;
        double gain = scratch.weight_to[c] - gamma * s_v * tot[c] / g.two_m;
        if (gain > best_gain || (gain == best_gain && c < best_c)) {
            best_gain = gain;
            best_c = c;
        }
    }
    tot[old_c] += s_v;
    for (int c : scratch.touched) scratch.weight_to[c] = -1.0;
    return {best_c, best_gain - stay_gain};
}

void apply_move(const LevelGraph& g, int v, int to, std::vector<int>& comm,
                std::vector<double>& tot) {
    tot[comm[v]] -= g.strength[v];
    tot[to] += g.strength[v];
    comm[v] = to;
}

// Louvain-style local moving: full sweeps in reshuffled node order until a
// sweep accepts no move. Returns the number of accepted moves.
int sweep_local_move(const LevelGraph& g, std::vector<int>& comm, std::vector<double>& tot,
                     double gamma, std::mt19937_64& rng) {
    MoveScratch scratch;
    scratch.weight_to.assign(g.n(), -1.0);
    std::vector<int> order(g.n());
    std::iota(order.begin(), order.end(), 0);
    const double raw_threshold = 0.5 * kMinQGain * g.two_m;
    int total_moves = 0;
    while (true) {
        shuffle_ids(order, rng);
        int moves = 0;
        for (int v : order) {
            auto [best_c, raw_delta] = best_community(g, v, comm, tot, scratch, gamma);
            if (best_c != comm[v] && raw_delta > raw_threshold) {
                apply_move(g, v, best_c, comm, tot);
                ++moves;
            }
        }
        total_moves += moves;
        if (moves == 0) break;
    }
    return total_moves;
}

// Leiden's fast local move: a queue seeded with all nodes in shuffled order;
// a successful move re-queues neighbors left in other communities.
int queue_local_move(const LevelGraph& g, std::vector<int>& comm, std::vector<double>& tot,
                     double gamma, std::mt19937_64& rng) {
    MoveScratch scratch;
    scratch.weight_to.assign(g.n(), -1.0);
    std::vector<int> queue(g.n());
    std::iota(queue.begin(), queue.end(), 0);
    shuffle_ids(queue, rng);
    std::vector<char> queued(g.n(), 1);
    const double raw_threshold = 0.5 * kMinQGain * g.two_m;
    std::size_t head = 0;
    int moves = 0;
    while (head < queue.size()) {
        int v = queue[head++];
        queued[v] = 0;
        auto [best_c, raw_delta] = best_community(g, v, comm, tot, scratch, gamma);
        if (best_c != comm[v] && raw_delta > raw_threshold) {
            apply_move(g, v, best_c, comm, tot);
            ++moves;
            for (const auto& [u, w] : g.adj[v]) {
                (void)w;
                if (comm[u] != best_c && !queued[u]) {
                    queued[u] = 1;
                    queue.push_back(u);
                }
            }
        }
    }
    return moves;
}

// Renumbers community ids to 0..C-1 by first occurrence.
int compress(std::vector<int>& comm) {
    std::vector<int> remap(comm.size(), -1);
    int next = 0;
    for (int& c : comm) {
        if (remap[c] < 0) remap[c] = next++;
        c = remap[c];
    }
    return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& part, int part_count) {
    LevelGraph out;
    out.adj.resize(part_count);
    out.self_loop.assign(part_count, 0.0);
    out.strength.assign(part_count, 0.0);
    out.two_m = g.two_m;
    std::unordered_map<std::int64_t, double> between;
    for (int u = 0; u < g.n(); ++u) {
        int cu = part[u];
        out.self_loop[cu] += g.self_loop[u];
        out.strength[cu] += g.strength[u];
        for (const auto& [v, w] : g.adj[u]) {
            int cv = part[v];
            if (cu == cv) {
                out.self_loop[cu] += w;  // both endpoints visit: internal lands twice
            } else if (cu < cv) {
                between[(static_cast<std::int64_t>(cu) << 32) | cv] += w;
            }
        }
    }
    for (const auto& [key, w] : between) {
        int a = static_cast<int>(key >> 32);
        int b = static_cast<int>(key & 0xffffffff);
        out.adj[a].emplace_back(b, w);
        out.adj[b].emplace_back(a, w);
    }
    for (auto& neighbors : out.adj) std::sort(neighbors.begin(), neighbors.end());
    return out;
}

std::vector<double> community_totals(const LevelGraph& g, const std::vector<int>& comm) {
    int count = 0;
    for (int c : comm) count = std::max(count, c + 1);
    std::vector<double> tot(count == 0 ? g.n() : std::max(count, g.n()), 0.0);
    for (int v = 0; v < g.n(); ++v) tot[comm[v]] += g.strength[v];
    return tot;
}

// Splits each community of `comm` into internally connected, well-linked
// subcommunities. Only nodes still alone in the refined partition may move,
// and only into subcommunities they share an edge with, so every refined
// community stays connected. Greedy target choice: best modularity gain,
// ties to the lowest id.
std::vector<int> refine(const LevelGraph& g, const std::vector<int>& comm, double gamma,
                        std::mt19937_64& rng) {
    int n = g.n();
    std::vector<int> refined(n);
    std::iota(refined.begin(), refined.end(), 0);
    std::vector<double> sub_tot = g.strength;       // refined community totals
    std::vector<double> sub_conn(n);                // refined comm -> weight into rest of S
    std::vector<int> sub_size(n, 1);

    int comm_count = 0;
    for (int c : comm) comm_count = std::max(comm_count, c + 1);
    std::vector<std::vector<int>> members(comm_count);
    for (int v = 0; v < n; ++v) members[comm[v]].push_back(v);

    std::vector<double> weight_to(n, -1.0);
    std::vector<int> touched;

    for (int s = 0; s < comm_count; ++s) {
        auto& nodes = members[s];
        if (nodes.size() < 2) continue;
        double tot_s = 0.0;
        for (int v : nodes) tot_s += g.strength[v];
        // Every refined community starts as a singleton; its connection to
        // the rest of S is its external weight within S.
        for (int v : nodes) {
            double conn = 0.0;
            for (const auto& [u, w] : g.adj[v])
                if (comm[u] == s && u != v) conn += w;
            sub_conn[v] = conn;
        }
        auto well_connected = [&](double conn, double tot_d) {
            return conn >= gamma * tot_d * (tot_s - tot_d) / g.two_m;
        };

        std::vector<int> order = nodes;
        shuffle_ids(order, rng);
        for (int v : order) {
            if (sub_size[refined[v]] != 1) continue;              // only lone nodes move
            if (!well_connected(sub_conn[v], g.strength[v])) continue;

            touched.clear();
            for (const auto& [u, w] : g.adj[v]) {
                if (comm[u] != s || u == v) continue;
                int d = refined[u];
                if (weight_to[d] < 0.0) {
                    weight_to[d] = 0.0;
                    touched.push_back(d);
                }
                weight_to[d] += w;
            }
            int best_d = -1;
            double best_gain = 0.0;
            for (int d : touched) {
                if (d == refined[v]) continue;
                if (!well_connected(sub_conn[d], sub_tot[d])) continue;
                double gain = weight_to[d] - gamma * g.strength[v] * sub_tot[d] / g.two_m;
                if (gain > best_gain || (gain == best_gain && best_d >= 0 && d < best_d)) {
                    best_gain = gain;
                    best_d = d;
                }
            }
            if (best_d >= 0 && best_gain > 0.0) {
                int own = refined[v];
                double e_vd = weight_to[best_d];
                sub_conn[best_d] += sub_conn[own] - 2.0 * e_vd;
                sub_tot[best_d] += g.strength[v];
                sub_size[best_d] += 1;
                sub_size[own] = 0;
                refined[v] = best_d;
            }
            for (int d : touched) weight_to[d] = -1.0;
        }
    }
    compress(refined);
    return refined;
}

// Splits any community whose induced subgraph is disconnected into its
// components. Never lowers modularity (severed parts share no edges).
void split_disconnected(const UndirectedView& g, std::vector<int>& labels) {
    int n = g.node_count();
    int count = 0;
    for (int c : labels) count = std::max(count, c + 1);
    std::vector<int> component(n, -1);
    std::vector<int> queue;
    int next = 0;
    for (int start = 0; start < n; ++start) {
        if (component[start] >= 0) continue;
        int comp_id = next++;
        component[start] = comp_id;
        queue.assign(1, start);
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (const auto& [v, w] : g.adj[u]) {
                (void)w;
                if (labels[v] == labels[start] && component[v] < 0) {
                    component[v] = comp_id;
                    queue.push_back(v);
                }
            }
        }
    }
    labels = component;
    compress(labels);
}

struct CommunityRun {
    std::vector<int> labels;
    std::vector<double> per_level_q;
};

CommunityRun run_louvain(const UndirectedView& view, double gamma, std::uint64_t seed) {
    LevelGraph g = level_from_view(view);
    std::mt19937_64 rng(seed);
    std::vector<int> flat(view.node_count());
    std::iota(flat.begin(), flat.end(), 0);
    CommunityRun run;
    for (int level = 0; level < kMaxLevels; ++level) {
        std::vector<int> comm(g.n());
        std::iota(comm.begin(), comm.end(), 0);
        auto tot = community_totals(g, comm);
        int moves = sweep_local_move(g, comm, tot, gamma, rng);
        int count = compress(comm);
        run.per_level_q.push_back(level_modularity(g, comm, gamma));
        for (int& f : flat) f = comm[f];
        if (moves == 0 || count == g.n()) break;
        g = aggregate(g, comm, count);
    }
    run.labels = std::move(flat);
    return run;
}

CommunityRun run_leiden(const UndirectedView& view, double gamma, std::uint64_t seed) {
    constexpr int kMaxPasses = 10;
    std::mt19937_64 rng(seed);
    CommunityRun run;

    // Iterated Leiden: each pass restarts the move/refine/aggregate loop from
    // the previous flat partition; refinement is what lets a later pass
    // escape the local optimum the previous one converged to.
    std::vector<int> result(view.node_count());
    std::iota(result.begin(), result.end(), 0);
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        LevelGraph g = level_from_view(view);
        std::vector<int> flat(view.node_count());
        std::iota(flat.begin(), flat.end(), 0);
        std::vector<int> comm = result;

        for (int level = 0; level < kMaxLevels; ++level) {
            auto tot = community_totals(g, comm);
            queue_local_move(g, comm, tot, gamma, rng);
            int comm_count = compress(comm);
            run.per_level_q.push_back(level_modularity(g, comm, gamma));
            if (comm_count == g.n()) break;  // nothing left to merge

            auto refined = refine(g, comm, gamma, rng);
            int refined_count = 0;
            for (int r : refined) refined_count = std::max(refined_count, r + 1);
            if (refined_count == g.n()) break;  // aggregation would be identity

            // Next level starts from the unrefined assignment projected onto
            // the refined super-nodes.
            std::vector<int> next_comm(refined_count, -1);
            for (int v = 0; v < g.n(); ++v) next_comm[refined[v]] = comm[v];
            for (int& f : flat) f = refined[f];
            g = aggregate(g, refined, refined_count);
            comm = std::move(next_comm);
            compress(comm);
        }
        std::vector<int> pass_result(view.node_count());
        for (int v = 0; v < view.node_count(); ++v) pass_result[v] = comm[flat[v]];
        compress(pass_result);
        bool stable = pass_result == result;
        result = std::move(pass_result);
        if (stable) break;
    }
    run.labels = std::move(result);
    return run;
}

Clustering make_community_clustering(const UndirectedView& g, CommunityRun run, Algorithm algo,
                                     double resolution, std::uint64_t seed) {
    Clustering c;
    c.node_order = g.node_ids;
    c.labels = std::move(run.labels);
    normalize_labels(c.labels);
    c.algorithm = algo;
    c.params = {{"resolution", std::to_string(resolution)}, {"seed", std::to_string(seed)}};
    c.iteration_quality = std::move(run.per_level_q);
    double q = modularity(g, Partition::from_labels(g, c.labels), resolution);
    c.iteration_quality.push_back(q);
    c.quality = q;
    return c;
}

}  // namespace

Partition Partition::from_labels(const UndirectedView& g, const std::vector<int>& labels) {
    if (static_cast<int>(labels.size()) != g.node_count())
        throw ConsistencyError("partition labels do not match the graph node count");
    Partition p;
    p.labels = labels;
    int count = 0;
    for (int l : labels) {
        if (l < 0) throw ParameterError("community labels must be non-negative");
        count = std::max(count, l + 1);
    }
    p.internal_weight.assign(count, 0.0);
    p.total_degree.assign(count, 0.0);
    for (int u = 0; u < g.node_count(); ++u) {
        p.total_degree[labels[u]] += g.strength[u];
        for (const auto& [v, w] : g.adj[u])
            if (u < v && labels[u] == labels[v]) p.internal_weight[labels[u]] += w;
    }
    return p;
}

Partition Partition::singletons(const UndirectedView& g) {
    std::vector<int> labels(g.node_count());
    std::iota(labels.begin(), labels.end(), 0);
    return from_labels(g, labels);
}

double modularity(const UndirectedView& g, const Partition& p, double resolution) {
    if (g.total_weight_2m <= 0.0)
        throw UndefinedScoreError("modularity is undefined on an edgeless graph");
    if (static_cast<int>(p.labels.size()) != g.node_count())
        throw ConsistencyError("partition labels do not match the graph node count");
    double two_m = g.total_weight_2m;
    double q = 0.0;
    for (int c = 0; c < p.community_count(); ++c) {
        double frac = p.total_degree[c] / two_m;
        q += 2.0 * p.internal_weight[c] / two_m - resolution * frac * frac;
    }
    return q;
}

Clustering louvain(const UndirectedView& g, double resolution, std::uint64_t seed) {
    if (g.total_weight_2m <= 0.0)
        throw UndefinedScoreError("louvain requires a graph with at least one edge");
    if (resolution <= 0.0) throw ParameterError("resolution must be positive");
    return make_community_clustering(g, run_louvain(g, resolution, seed), Algorithm::louvain,
                                     resolution, seed);
}

Clustering leiden(const UndirectedView& g, double resolution, std::uint64_t seed) {
    if (g.total_weight_2m <= 0.0)
        throw UndefinedScoreError("leiden requires a graph with at least one edge");
    if (resolution <= 0.0) throw ParameterError("resolution must be positive");
    CommunityRun run = run_leiden(g, resolution, seed);
    split_disconnected(g, run.labels);
    return make_community_clustering(g, std::move(run), Algorithm::leiden, resolution, seed);
}

std::vector<int> refine_partition(const UndirectedView& g, const std::vector<int>& labels,
                                  double resolution, std::uint64_t seed) {
    if (g.total_weight_2m <= 0.0)
        throw UndefinedScoreError("refinement requires a graph with at least one edge");
    LevelGraph level = level_from_view(g);
    std::mt19937_64 rng(seed);
    std::vector<int> comm = labels;
    compress(comm);
    return refine(level, comm, resolution, rng);
}

std::vector<int> check_connectivity(const UndirectedView& g, const Partition& p) {
    int n = g.node_count();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<int>> members(p.community_count());
    for (int v = 0; v < n; ++v) members[p.labels[v]].push_back(v);

    std::vector<int> disconnected;
    std::vector<int> queue;
    for (int c = 0; c < p.community_count(); ++c) {
        if (members[c].size() <= 1) continue;
        int reached = 1;
        int start = members[c][0];
        seen[start] = 1;
        queue.assign(1, start);
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (const auto& [v, w] : g.adj[u]) {
                (void)w;
                if (p.labels[v] == c && !seen[v]) {
                    seen[v] = 1;
                    ++reached;
                    queue.push_back(v);
                }
            }
        }
        if (reached != static_cast<int>(members[c].size())) disconnected.push_back(c);
    }
    return disconnected;
}

}  // namespace callrisk

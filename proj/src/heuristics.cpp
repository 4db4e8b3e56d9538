#include "callrisk/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "callrisk/errors.hpp"

namespace callrisk {
namespace {

const std::vector<std::string> kBridgingCwes = {"CWE-668"};
const std::vector<std::string> kHotspotCwes = {"CWE-284"};
const std::vector<std::string> kDanglingCwes = {"CWE-94", "CWE-1164"};
const std::vector<std::string> kHubCwes = {"CWE-20"};
const std::vector<std::string> kWeakCwes = {"CWE-200"};

// Score descending, subject ascending; rank is 1-based within the heuristic.
void order_and_rank(std::vector<Finding>& findings) {
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.subject < b.subject;
    });
    for (std::size_t i = 0; i < findings.size(); ++i)
        findings[i].rank = static_cast<int>(i) + 1;
}

struct MeanStddev {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

MeanStddev mean_stddev(const std::vector<double>& xs) {
    MeanStddev ms;
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
    ms.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return ms;
}

void require_matching(const CallGraph& g, const Clustering& c) {
    if (static_cast<int>(c.labels.size()) != g.node_count() ||
        static_cast<int>(c.node_order.size()) != g.node_count())
        throw ConsistencyError("clustering size does not match the graph");
    for (int i = 0; i < g.node_count(); ++i)
        if (c.node_order[i] != g.node_id(i))
            throw ConsistencyError("clustering node order does not match the graph");
}

}  // namespace

const char* heuristic_name(Heuristic h) {
    switch (h) {
        case Heuristic::bridging: return "bridging";
        case Heuristic::hotspot: return "hotspot";
        case Heuristic::dangling: return "dangling";
        case Heuristic::hub: return "hub";
        case Heuristic::weak: return "weak";
    }
    return "?";
}

const std::vector<std::string>& heuristic_cwes(Heuristic h) {
    switch (h) {
        case Heuristic::bridging: return kBridgingCwes;
        case Heuristic::hotspot: return kHotspotCwes;
        case Heuristic::dangling: return kDanglingCwes;
        case Heuristic::hub: return kHubCwes;
        case Heuristic::weak: return kWeakCwes;
    }
    return kBridgingCwes;
}

void HeuristicConfig::validate() const {
    if (bridging_max_cluster_size < 1) throw ParameterError("bridging.max_cluster_size must be >= 1");
    if (bridging_min_neighbor_clusters < 1)
        throw ParameterError("bridging.min_neighbor_clusters must be >= 1");
    if (hotspot_min_incoming_zscore <= 0.0)
        throw ParameterError("hotspot.min_incoming_zscore must be positive");
    if (hub_min_degree_zscore <= 0.0) throw ParameterError("hub.min_degree_zscore must be positive");
    if (hub_min_cluster_spread < 1) throw ParameterError("hub.min_cluster_spread must be >= 1");
    if (weak_min_ratio <= 0.0) throw ParameterError("weak.min_ratio must be positive");
}

HeuristicConfig HeuristicConfig::from_text(const std::string& text) {
    HeuristicConfig cfg;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "bridging.max_cluster_size") cfg.bridging_max_cluster_size = std::stoi(value);
            else if (key == "bridging.min_neighbor_clusters")
                cfg.bridging_min_neighbor_clusters = std::stoi(value);
            else if (key == "hotspot.min_incoming_zscore")
                cfg.hotspot_min_incoming_zscore = std::stod(value);
            else if (key == "hub.min_degree_zscore") cfg.hub_min_degree_zscore = std::stod(value);
            else if (key == "hub.min_cluster_spread") cfg.hub_min_cluster_spread = std::stoi(value);
            else if (key == "weak.min_ratio") cfg.weak_min_ratio = std::stod(value);
            else throw ParseError("unknown config key '" + key + "'", line_no);
        } catch (const std::invalid_argument&) {
            throw ParseError("bad numeric value '" + value + "' for " + key, line_no);
        } catch (const std::out_of_range&) {
            throw ParseError("value out of range for " + key, line_no);
        }
    }
    cfg.validate();
    return cfg;
}

HeuristicConfig HeuristicConfig::from_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error("cannot open heuristic config: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return from_text(buffer.str());
}

std::vector<ClusterProfile> profile_clusters(const CallGraph& g, const Clustering& c) {
    require_matching(g, c);
    int count = c.cluster_count();
    std::vector<ClusterProfile> profiles(count);
    std::vector<std::set<int>> neighbor_sets(count);
    for (int i = 0; i < count; ++i) profiles[i].cluster_id = i;
    for (int v = 0; v < g.node_count(); ++v)
        if (c.labels[v] >= 0) ++profiles[c.labels[v]].node_count;

    for (const auto& e : g.edges()) {
        if (e.is_self_loop()) continue;
        int lc = c.labels[e.caller];
        int le = c.labels[e.callee];
        if (lc >= 0 && lc == le) {
            profiles[lc].internal_weight += e.weight;
            continue;
        }
        if (lc >= 0) {
            profiles[lc].outgoing_external += e.weight;
            if (le >= 0) neighbor_sets[lc].insert(le);
        }
        if (le >= 0) {
            profiles[le].incoming_external += e.weight;
            if (lc >= 0) neighbor_sets[le].insert(lc);
        }
    }
    for (int i = 0; i < count; ++i) {
        auto& p = profiles[i];
        p.external_weight = p.incoming_external + p.outgoing_external;
        p.neighbor_clusters = static_cast<int>(neighbor_sets[i].size());
        p.external_internal_ratio =
            p.internal_weight > 0
                ? static_cast<double>(p.external_weight) / static_cast<double>(p.internal_weight)
                : std::numeric_limits<double>::infinity();
    }
    return profiles;
}

std::vector<Finding> detect_bridging(const std::vector<ClusterProfile>& profiles,
                                     const HeuristicConfig& cfg) {
    std::vector<Finding> findings;
    for (const auto& p : profiles) {
        if (p.node_count == 0 || p.node_count > cfg.bridging_max_cluster_size) continue;
        if (p.neighbor_clusters < cfg.bridging_min_neighbor_clusters) continue;
        Finding f;
        f.heuristic = Heuristic::bridging;
        f.subject = std::to_string(p.cluster_id);
        f.score = p.neighbor_clusters;
        f.cwes = kBridgingCwes;
        f.evidence = {{"node_count", static_cast<double>(p.node_count)},
                      {"neighbor_clusters", static_cast<double>(p.neighbor_clusters)}};
        findings.push_back(std::move(f));
    }
    order_and_rank(findings);
    return findings;
}

std::vector<Finding> detect_hotspots(const std::vector<ClusterProfile>& profiles,
                                     const HeuristicConfig& cfg) {
    std::vector<Finding> findings;
    if (profiles.size() < 2) return findings;
    std::vector<double> incoming;
    incoming.reserve(profiles.size());
    for (const auto& p : profiles) incoming.push_back(static_cast<double>(p.incoming_external));
    auto ms = mean_stddev(incoming);
    double threshold = ms.mean + cfg.hotspot_min_incoming_zscore * ms.stddev;
    for (const auto& p : profiles) {
        if (static_cast<double>(p.incoming_external) <= threshold) continue;
        Finding f;
        f.heuristic = Heuristic::hotspot;
        f.subject = std::to_string(p.cluster_id);
        f.score = static_cast<double>(p.incoming_external);
        f.cwes = kHotspotCwes;
        f.evidence = {{"incoming_external", static_cast<double>(p.incoming_external)},
                      {"mean", ms.mean},
                      {"stddev", ms.stddev},
                      {"threshold", threshold}};
        findings.push_back(std::move(f));
    }
    order_and_rank(findings);
    return findings;
}

std::vector<Finding> detect_dangling(const CallGraph& g, const Clustering& c) {
    require_matching(g, c);
    UndirectedView view = project_undirected(g);
    std::vector<Finding> findings;
    for (int v = 0; v < g.node_count(); ++v) {
        if (view.adj[v].size() != 1) continue;
        int neighbor = view.adj[v][0].first;
        if (c.labels[neighbor] == c.labels[v]) continue;  // also rules out same-cluster edges
        Finding f;
        f.heuristic = Heuristic::dangling;
        f.node_subject = true;
        f.subject = g.node_id(v);
        f.score = 1.0;
        f.cwes = kDanglingCwes;
        f.evidence = {{"neighbor_count", 1.0},
                      {"own_cluster", static_cast<double>(c.labels[v])},
                      {"neighbor_cluster", static_cast<double>(c.labels[neighbor])}};
        findings.push_back(std::move(f));
    }
    order_and_rank(findings);
    return findings;
}

std::vector<Finding> detect_hubs(const CallGraph& g, const Clustering& c,
                                 const HeuristicConfig& cfg) {
    require_matching(g, c);
    if (g.node_count() < 2) return {};
    auto stats = degree_stats(g);
    std::vector<double> connections;
    connections.reserve(stats.size());
    for (const auto& s : stats) connections.push_back(static_cast<double>(s.total_connections));
    auto ms = mean_stddev(connections);
    double threshold = ms.mean + cfg.hub_min_degree_zscore * ms.stddev;

    UndirectedView view = project_undirected(g);
    std::vector<Finding> findings;
    std::set<int> spread_set;
    for (int v = 0; v < g.node_count(); ++v) {
        if (connections[v] <= threshold) continue;
        spread_set.clear();
        for (const auto& [u, w] : view.adj[v]) {
            (void)w;
            if (c.labels[u] >= 0) spread_set.insert(c.labels[u]);
        }
        int spread = static_cast<int>(spread_set.size());
        if (spread < cfg.hub_min_cluster_spread) continue;
        Finding f;
        f.heuristic = Heuristic::hub;
        f.node_subject = true;
        f.subject = g.node_id(v);
        f.score = connections[v];
        f.cwes = kHubCwes;
        f.evidence = {{"total_connections", connections[v]},
                      {"out_degree", static_cast<double>(stats[v].out_degree)},
                      {"in_degree", static_cast<double>(stats[v].in_degree)},
                      {"cluster_spread", static_cast<double>(spread)},
                      {"mean", ms.mean},
                      {"stddev", ms.stddev},
                      {"threshold", threshold}};
        findings.push_back(std::move(f));
    }
    order_and_rank(findings);
    return findings;
}

std::vector<Finding> detect_weak_clusters(const std::vector<ClusterProfile>& profiles,
                                          const HeuristicConfig& cfg) {
    std::vector<Finding> findings;
    for (const auto& p : profiles) {
        if (p.node_count == 0 || p.external_weight == 0) continue;
        if (p.internal_weight > 0 && p.external_internal_ratio < cfg.weak_min_ratio) continue;
        Finding f;
        f.heuristic = Heuristic::weak;
        f.subject = std::to_string(p.cluster_id);
        f.score = p.external_internal_ratio;
        f.cwes = kWeakCwes;
        f.evidence = {{"internal_weight", static_cast<double>(p.internal_weight)},
                      {"external_weight", static_cast<double>(p.external_weight)},
                      {"ratio", p.external_internal_ratio}};
        findings.push_back(std::move(f));
    }
    order_and_rank(findings);
    return findings;
}

int HeuristicCounts::for_heuristic(Heuristic h) const {
    switch (h) {
        case Heuristic::bridging: return bridging;
        case Heuristic::hotspot: return hotspot;
        case Heuristic::dangling: return dangling;
        case Heuristic::hub: return hub;
        case Heuristic::weak: return weak;
    }
    return 0;
}

HeuristicRun run_all_heuristics(const CallGraph& g, const Clustering& c,
                                const HeuristicConfig& cfg) {
    cfg.validate();
    HeuristicRun run;
    auto profiles = profile_clusters(g, c);
    if (profiles.size() < 2)
        run.warnings.push_back(
            "hotspot heuristic skipped: needs at least two clusters, got " +
            std::to_string(profiles.size()));

    auto append = [&run](std::vector<Finding> found, int& counter) {
        counter = static_cast<int>(found.size());
        run.findings.insert(run.findings.end(), std::make_move_iterator(found.begin()),
                            std::make_move_iterator(found.end()));
    };
    append(detect_bridging(profiles, cfg), run.counts.bridging);
    append(detect_hotspots(profiles, cfg), run.counts.hotspot);
    append(detect_dangling(g, c), run.counts.dangling);
    append(detect_hubs(g, c, cfg), run.counts.hub);
    append(detect_weak_clusters(profiles, cfg), run.counts.weak);
    return run;
}

}  // namespace callrisk

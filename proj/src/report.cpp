#include "callrisk/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "callrisk/errors.hpp"
#include "callrisk/version.hpp"

namespace callrisk {

using ordered_json = nlohmann::ordered_json;

namespace {

const Heuristic kAllHeuristics[] = {Heuristic::bridging, Heuristic::hotspot,
                                    Heuristic::dangling, Heuristic::hub, Heuristic::weak};

// Non-finite values have no JSON number representation; the schema uses the
// string "inf" for the +inf ratio sentinel.
ordered_json json_score(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return round6(x);
}

double score_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        double inf = std::numeric_limits<double>::infinity();
        return j.get<std::string>() == "-inf" ? -inf : inf;
    }
    return j.get<double>();
}

std::string format_score(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", round6(x));
    return buf;
}

ordered_json finding_to_json(const ReportFinding& rf) {
    const Finding& f = rf.finding;
    ordered_json j;
    j["run"] = rf.run;
    j["heuristic"] = heuristic_name(f.heuristic);
    j["subject_kind"] = f.node_subject ? "node" : "cluster";
    j["subject"] = f.subject;
    j["score"] = json_score(f.score);
    j["rank"] = f.rank;
    j["cwes"] = f.cwes;
    ordered_json ev = ordered_json::object();
    for (const auto& [k, v] : f.evidence) ev[k] = json_score(v);
    j["evidence"] = std::move(ev);
    return j;
}

Heuristic heuristic_from_name(const std::string& name) {
    for (Heuristic h : kAllHeuristics)
        if (name == heuristic_name(h)) return h;
    throw ParameterError("unknown heuristic: " + name);
}

}  // namespace

double round6(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return std::strtod(buf, nullptr);
}

bool ReportFinding::operator==(const ReportFinding& o) const {
    const Finding& a = finding;
    const Finding& b = o.finding;
    return run == o.run && a.heuristic == b.heuristic && a.node_subject == b.node_subject &&
           a.subject == b.subject && a.score == b.score && a.rank == b.rank && a.cwes == b.cwes &&
           a.evidence == b.evidence;
}

void AnalysisReport::refresh_counts() {
    heuristic_counts.clear();
    for (Heuristic h : kAllHeuristics) {
        auto& row = heuristic_counts[heuristic_name(h)];
        for (const auto& run : runs) row[run.algorithm] = 0;
    }
    for (const auto& rf : findings)
        ++heuristic_counts[heuristic_name(rf.finding.heuristic)][rf.run];
}

std::string render_json(const AnalysisReport& r) {
    ordered_json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["tool_version"] = r.tool_version;
    doc["graph"] = {{"nodes", r.graph.nodes},
                    {"edges", r.graph.edges},
                    {"total_weight", r.graph.total_weight}};
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    doc["config"] = std::move(cfg);

    auto runs = ordered_json::array();
    for (const auto& run : r.runs) {
        ordered_json j;
        j["algorithm"] = run.algorithm;
        ordered_json params = ordered_json::object();
        for (const auto& [k, v] : run.params) params[k] = v;
        j["params"] = std::move(params);
        j["clusters"] = run.cluster_count;
        j["noise"] = run.noise_count;
        j["quality_metric"] = run.quality_metric;
        if (run.quality)
            j["quality"] = round6(*run.quality);
        else
            j["quality"] = nullptr;
        j["elapsed_ms"] = round6(run.elapsed_ms);
        runs.push_back(std::move(j));
    }
    doc["runs"] = std::move(runs);

    auto counts = ordered_json::array();
    for (Heuristic h : kAllHeuristics) {
        ordered_json row;
        row["heuristic"] = heuristic_name(h);
        row["cwes"] = heuristic_cwes(h);
        ordered_json per_run = ordered_json::object();
        int total = 0;
        auto it = r.heuristic_counts.find(heuristic_name(h));
        if (it != r.heuristic_counts.end()) {
            for (const auto& [algo, count] : it->second) {
                per_run[algo] = count;
                total += count;
            }
        }
        row["counts"] = std::move(per_run);
        row["total"] = total;
        counts.push_back(std::move(row));
    }
    doc["heuristic_counts"] = std::move(counts);

    auto findings = ordered_json::array();
    for (const auto& rf : r.findings) findings.push_back(finding_to_json(rf));
    doc["findings"] = std::move(findings);
    return doc.dump(2) + "\n";
}

AnalysisReport parse_report(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("report JSON: ") + e.what(), 1);
    }
    if (doc.value("schema_version", -1) != kReportSchemaVersion)
        throw Error("unsupported report schema_version");
    AnalysisReport r;
    r.tool_version = doc.value("tool_version", "");
    const auto& g = doc.at("graph");
    r.graph.nodes = g.at("nodes").get<int>();
    r.graph.edges = g.at("edges").get<int>();
    r.graph.total_weight = g.at("total_weight").get<std::int64_t>();
    if (doc.contains("config"))
        for (const auto& [k, v] : doc.at("config").items()) r.config[k] = v.get<std::string>();
    for (const auto& j : doc.at("runs")) {
        RunSummary run;
        run.algorithm = j.at("algorithm").get<std::string>();
        for (const auto& [k, v] : j.at("params").items()) run.params[k] = v.get<std::string>();
        run.cluster_count = j.at("clusters").get<int>();
        run.noise_count = j.at("noise").get<int>();
        run.quality_metric = j.at("quality_metric").get<std::string>();
        if (!j.at("quality").is_null()) run.quality = j.at("quality").get<double>();
        run.elapsed_ms = j.at("elapsed_ms").get<double>();
        r.runs.push_back(std::move(run));
    }
    for (const auto& row : doc.at("heuristic_counts")) {
        auto& per_run = r.heuristic_counts[row.at("heuristic").get<std::string>()];
        for (const auto& [algo, count] : row.at("counts").items())
            per_run[algo] = count.get<int>();
    }
    for (const auto& j : doc.at("findings")) {
        ReportFinding rf;
        rf.run = j.at("run").get<std::string>();
        rf.finding.heuristic = heuristic_from_name(j.at("heuristic").get<std::string>());
        rf.finding.node_subject = j.at("subject_kind").get<std::string>() == "node";
        rf.finding.subject = j.at("subject").get<std::string>();
        rf.finding.score = score_from_json(j.at("score"));
        rf.finding.rank = j.at("rank").get<int>();
        for (const auto& cwe : j.at("cwes")) rf.finding.cwes.push_back(cwe.get<std::string>());
        for (const auto& [k, v] : j.at("evidence").items())
            rf.finding.evidence[k] = score_from_json(v);
        r.findings.push_back(std::move(rf));
    }
    return r;
}

std::string render_markdown(const AnalysisReport& r) {
    std::ostringstream out;
    out << "# Call graph risk report\n\n";
    out << "## Graph\n\n";
    out << "- nodes: " << r.graph.nodes << "\n";
    out << "- edges: " << r.graph.edges << "\n";
    out << "- total call weight: " << r.graph.total_weight << "\n\n";

    out << "## Algorithm comparison\n\n";
    out << "| algorithm | clusters | noise | quality metric | quality | runtime (ms) |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& run : r.runs) {
        out << "| " << run.algorithm << " | " << run.cluster_count << " | " << run.noise_count
            << " | " << run.quality_metric << " | "
            << (run.quality ? format_score(*run.quality) : std::string("n/a")) << " | "
            << format_score(run.elapsed_ms) << " |\n";
    }
    out << "\n";

    out << "## Heuristic counts\n\n";
    out << "| heuristic |";
    for (const auto& run : r.runs) out << " " << run.algorithm << " |";
    out << " weakness |\n|---|";
    for (std::size_t i = 0; i < r.runs.size(); ++i) out << "---|";
    out << "---|\n";
    for (Heuristic h : kAllHeuristics) {
        out << "| " << heuristic_name(h) << " |";
        auto it = r.heuristic_counts.find(heuristic_name(h));
        for (const auto& run : r.runs) {
            int count = 0;
            if (it != r.heuristic_counts.end()) {
                auto rit = it->second.find(run.algorithm);
                if (rit != it->second.end()) count = rit->second;
            }
            out << " " << count << " |";
        }
        const auto& cwes = heuristic_cwes(h);
        out << " ";
        for (std::size_t i = 0; i < cwes.size(); ++i) out << (i ? ", " : "") << cwes[i];
        out << " |\n";
    }
    out << "\n";

    out << "## Top findings\n";
    for (Heuristic h : kAllHeuristics) {
        out << "\n### " << heuristic_name(h) << "\n\n";
        std::vector<const ReportFinding*> hits;
        for (const auto& rf : r.findings)
            if (rf.finding.heuristic == h) hits.push_back(&rf);
        if (hits.empty()) {
            out << "No findings.\n";
            continue;
        }
        std::stable_sort(hits.begin(), hits.end(),
                         [](const ReportFinding* a, const ReportFinding* b) {
                             if (a->finding.score != b->finding.score)
                                 return a->finding.score > b->finding.score;
                             if (a->finding.subject != b->finding.subject)
                                 return a->finding.subject < b->finding.subject;
                             return a->run < b->run;
                         });
        std::size_t shown = std::min<std::size_t>(3, hits.size());
        for (std::size_t i = 0; i < shown; ++i) {
            const auto& f = hits[i]->finding;
            out << (i + 1) << ". " << (f.node_subject ? "node `" : "cluster `") << f.subject
                << "` (run: " << hits[i]->run << ", score: " << format_score(f.score) << ")\n";
        }
        if (hits.size() > shown) out << "   ... +" << (hits.size() - shown) << " more\n";
    }
    return out.str();
}

std::string export_top_k_dot(const CallGraph& g, const Clustering& c, int k) {
    if (k < 1) throw ParameterError("top-k must be >= 1");
    if (static_cast<int>(c.labels.size()) != g.node_count())
        throw ConsistencyError("clustering size does not match the graph");

    int count = c.cluster_count();
    std::vector<int> sizes(count, 0);
    for (int l : c.labels)
        if (l >= 0) ++sizes[l];
    std::vector<int> order;
    for (int i = 0; i < count; ++i)
        if (sizes[i] > 0) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return a < b;  // size ties go to the lower cluster id
    });
    if (static_cast<int>(order.size()) > k) order.resize(k);
    std::vector<char> keep_cluster(count, 0);
    for (int id : order) keep_cluster[id] = 1;

    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') out.push_back('\\');
            out.push_back(ch);
        }
        out.push_back('"');
        return out;
    };

    std::ostringstream out;
    out << "digraph clusters {\n";
    for (int id : order) {
        out << "  subgraph cluster_" << id << " {\n";
        out << "    label=\"cluster " << id << " (" << sizes[id] << " nodes)\";\n";
        const char* color = kPalette[id % 10];
        for (int v = 0; v < g.node_count(); ++v) {
            if (c.labels[v] != id) continue;
            out << "    " << quote(g.node_id(v)) << " [style=filled, fillcolor=\"" << color
                << "\"";
            if (g.node(v).label != g.node_id(v)) out << ", label=" << quote(g.node(v).label);
            out << "];\n";
        }
        out << "  }\n";
    }
    for (const auto& e : g.edges()) {
        if (e.is_self_loop()) continue;
        int lc = c.labels[e.caller];
        int le = c.labels[e.callee];
        if (lc < 0 || le < 0 || !keep_cluster[lc] || !keep_cluster[le]) continue;
        out << "  " << quote(g.node_id(e.caller)) << " -> " << quote(g.node_id(e.callee))
            << " [weight=" << e.weight << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace callrisk

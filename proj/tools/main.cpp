#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "callrisk/community.hpp"
#include "callrisk/density.hpp"
#include "callrisk/distance.hpp"
#include "callrisk/errors.hpp"
#include "callrisk/io.hpp"
#include "callrisk/pipeline.hpp"
#include "callrisk/report.hpp"
#include "callrisk/version.hpp"

namespace fs = std::filesystem;
using namespace callrisk;

namespace {

// Shared analyze/export options. The config file (key=value, '#' comments) is
// applied first; explicitly passed CLI flags win over it.
struct CliOptions {
    RunConfig cfg;
    std::string algorithms_csv;
    std::string formats_csv;
    std::string config_path;
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// General pipeline keys accepted in the config file next to the heuristic
// thresholds.
void apply_config_file(const std::string& path, RunConfig& cfg, std::string& algorithms_csv,
                       std::string& formats_csv) {
    std::ifstream file(path);
    if (!file) throw Error("cannot open config file: " + path);
    std::string heuristic_lines;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
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
            if (key == "eps") cfg.eps = std::stod(value);
            else if (key == "min_pts") cfg.min_pts = std::stoi(value);
            else if (key == "min_cluster_size") cfg.min_cluster_size = std::stoi(value);
            else if (key == "resolution") cfg.resolution = std::stod(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "top_k") cfg.top_k = std::stoi(value);
            else if (key == "node_cap") cfg.node_cap = std::stoi(value);
            else if (key == "algorithms") algorithms_csv = value;
            else if (key == "format") formats_csv = value;
            else heuristic_lines += key + " = " + value + "\n";
        } catch (const std::invalid_argument&) {
            throw ParseError("bad numeric value '" + value + "' for " + key, line_no);
        }
    }
    if (!heuristic_lines.empty()) cfg.heuristics = HeuristicConfig::from_text(heuristic_lines);
}

void add_common_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--input,-i", opts.cfg.input_path, "input graph file")->required();
    cmd->add_option("--format-in", opts.cfg.input_format, "input format: dot, edgelist or auto")
        ->check(CLI::IsMember({"dot", "edgelist", "auto"}));
    cmd->add_option("--algorithms,-a", opts.algorithms_csv,
                    "comma-separated subset of dbscan,hdbscan,louvain,leiden");
    cmd->add_option("--eps", opts.cfg.eps, "dbscan neighborhood radius");
    cmd->add_option("--min-pts", opts.cfg.min_pts, "dbscan core threshold");
    cmd->add_option("--min-cluster-size", opts.cfg.min_cluster_size, "hdbscan minimum cluster size");
    cmd->add_option("--resolution", opts.cfg.resolution, "louvain/leiden resolution");
    cmd->add_option("--seed", opts.cfg.seed, "random seed (echoed into reports)");
    cmd->add_option("--heuristic-config", opts.config_path,
                    "key=value config file; CLI flags override it");
    cmd->add_option("--out-dir,-o", opts.cfg.out_dir, "output directory");
    cmd->add_option("--top-k", opts.cfg.top_k, "clusters kept in DOT exports");
    cmd->add_option("--node-cap", opts.cfg.node_cap, "distance-model node cap");
}

// Config-file values must not override explicitly passed flags: stash CLI
// values, apply the file, then re-read the flags that were actually given.
void finalize_options(CLI::App* cmd, CliOptions& opts) {
    if (!opts.config_path.empty()) {
        RunConfig file_cfg = opts.cfg;
        std::string algorithms_csv = opts.algorithms_csv;
        std::string formats_csv = opts.formats_csv;
        apply_config_file(opts.config_path, file_cfg, algorithms_csv, formats_csv);
        auto keep_cli = [&](const char* flag) { return cmd->count(flag) > 0; };
        if (!keep_cli("--eps")) opts.cfg.eps = file_cfg.eps;
        if (!keep_cli("--min-pts")) opts.cfg.min_pts = file_cfg.min_pts;
        if (!keep_cli("--min-cluster-size")) opts.cfg.min_cluster_size = file_cfg.min_cluster_size;
        if (!keep_cli("--resolution")) opts.cfg.resolution = file_cfg.resolution;
        if (!keep_cli("--seed")) opts.cfg.seed = file_cfg.seed;
        if (!keep_cli("--top-k")) opts.cfg.top_k = file_cfg.top_k;
        if (!keep_cli("--node-cap")) opts.cfg.node_cap = file_cfg.node_cap;
        if (!keep_cli("--algorithms")) opts.algorithms_csv = algorithms_csv;
        if (cmd->get_option_no_throw("--format") == nullptr || !keep_cli("--format"))
            opts.formats_csv = formats_csv.empty() ? opts.formats_csv : formats_csv;
        opts.cfg.heuristics = file_cfg.heuristics;
    }
    if (!opts.algorithms_csv.empty()) {
        opts.cfg.algorithms.clear();
        for (const auto& name : split_csv(opts.algorithms_csv))
            opts.cfg.algorithms.push_back(algorithm_from_name(name));
    }
    if (!opts.formats_csv.empty()) opts.cfg.formats = split_csv(opts.formats_csv);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

int cmd_analyze(CliOptions& opts) {
    CallGraph g = load_graph(opts.cfg.input_path, opts.cfg.input_format);
    AnalysisResult result = run_analysis(g, opts.cfg);
    for (const auto& w : result.warnings) std::cerr << "callrisk: warning: " << w << "\n";

    fs::create_directories(opts.cfg.out_dir);
    fs::path dir(opts.cfg.out_dir);
    for (const auto& format : opts.cfg.formats) {
        if (format == "json") {
            write_file(dir / "report.json", render_json(result.report));
            std::cout << (dir / "report.json").string() << "\n";
        } else if (format == "md") {
            write_file(dir / "report.md", render_markdown(result.report));
            std::cout << (dir / "report.md").string() << "\n";
        } else if (format == "dot") {
            for (std::size_t i = 0; i < result.clusterings.size(); ++i) {
                const auto& clustering = result.clusterings[i];
                if (clustering.cluster_count() == 0) {
                    std::cerr << "callrisk: warning: " << result.report.runs[i].algorithm
                              << " produced no clusters, skipping DOT export\n";
                    continue;
                }
                fs::path path = dir / ("clusters_" + result.report.runs[i].algorithm + ".dot");
                write_file(path, export_top_k_dot(g, clustering, opts.cfg.top_k));
                std::cout << path.string() << "\n";
            }
        }
    }
    return result.report.findings.empty() ? 0 : 2;
}

int cmd_validate(const std::string& input, const std::string& format) {
    CallGraph g = load_graph(input, format);
    UndirectedView view = project_undirected(g);
    // Connected components of the undirected projection.
    int components = 0;
    std::vector<char> seen(g.node_count(), 0);
    std::vector<int> stack;
    for (int start = 0; start < g.node_count(); ++start) {
        if (seen[start]) continue;
        ++components;
        seen[start] = 1;
        stack.assign(1, start);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : view.adj[u]) {
                (void)w;
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
    }
    std::cout << "nodes=" << g.node_count() << " edges=" << g.edge_count()
              << " self_loops=" << g.self_loop_count() << " components=" << components << "\n";
    return 0;
}

int cmd_export(CliOptions& opts) {
    CallGraph g = load_graph(opts.cfg.input_path, opts.cfg.input_format);
    opts.cfg.formats = {"dot"};
    opts.cfg.validate();

    std::optional<DistanceModel> dm;
    std::optional<UndirectedView> view;
    fs::create_directories(opts.cfg.out_dir);
    fs::path dir(opts.cfg.out_dir);
    for (Algorithm algo : opts.cfg.algorithms) {
        Clustering clustering;
        switch (algo) {
            case Algorithm::dbscan:
                if (!dm) dm = hop_distance_model(g, opts.cfg.node_cap);
                clustering = dbscan(*dm, opts.cfg.eps, opts.cfg.min_pts);
                break;
            case Algorithm::hdbscan:
                if (!dm) dm = hop_distance_model(g, opts.cfg.node_cap);
                clustering = hdbscan(*dm, opts.cfg.min_cluster_size);
                break;
            case Algorithm::louvain:
                if (!view) view = project_undirected(g);
                clustering = louvain(*view, opts.cfg.resolution, opts.cfg.seed);
                break;
            case Algorithm::leiden:
                if (!view) view = project_undirected(g);
                clustering = leiden(*view, opts.cfg.resolution, opts.cfg.seed);
                break;
        }
        if (clustering.cluster_count() == 0) {
            std::cerr << "callrisk: warning: " << algorithm_name(algo)
                      << " produced no clusters, skipping DOT export\n";
            continue;
        }
        fs::path path = dir / ("clusters_" + std::string(algorithm_name(algo)) + ".dot");
        write_file(path, export_top_k_dot(g, clustering, opts.cfg.top_k));
        std::cout << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"call graph clustering and structural risk analysis"};
    app.set_version_flag("--version", std::string("callrisk ") + kVersion);
    app.require_subcommand(1);

    CliOptions analyze_opts;
    auto* analyze = app.add_subcommand("analyze", "cluster a call graph and report findings");
    add_common_options(analyze, analyze_opts);
    analyze->add_option("--format", analyze_opts.formats_csv,
                        "comma-separated outputs: json,md,dot");
    analyze->add_flag("--no-timing", analyze_opts.cfg.no_timing,
                      "zero out elapsed times for reproducible reports");

    std::string validate_input, validate_format = "auto";
    auto* validate = app.add_subcommand("validate", "parse a graph and print its stats");
    validate->add_option("--input,-i", validate_input, "input graph file")->required();
    validate->add_option("--format-in", validate_format, "input format: dot, edgelist or auto")
        ->check(CLI::IsMember({"dot", "edgelist", "auto"}));

    CliOptions export_opts;
    auto* exporter = app.add_subcommand("export", "write top-K cluster DOT files");
    add_common_options(exporter, export_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) {
            finalize_options(analyze, analyze_opts);
            return cmd_analyze(analyze_opts);
        }
        if (app.got_subcommand(validate)) return cmd_validate(validate_input, validate_format);
        if (app.got_subcommand(exporter)) {
            finalize_options(exporter, export_opts);
            return cmd_export(export_opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "callrisk: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "callrisk/errors.hpp"
#include "callrisk/io.hpp"

namespace callrisk {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream iss(line);
    std::string field;
    while (iss >> field) fields.push_back(field);
    return fields;
}

std::int64_t parse_weight(const std::string& text, int line_no) {
    errno = 0;
    char* end = nullptr;
    long long value = std::strtoll(text.c_str(), &end, 10);
    if (errno != 0 || end == text.c_str() || *end != '\0')
        throw ParseError("weight is not an integer: '" + text + "'", line_no);
    if (value < 1) throw ParseError("weight must be >= 1, got " + text, line_no);
    return value;
}

}  // namespace

CallGraph parse_edge_list(const std::string& text) {
    CallGraph::Builder builder;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = split_fields(line);
        if (fields.size() != 2 && fields.size() != 3)
            throw ParseError("expected 'caller callee [weight]', got " +
                                 std::to_string(fields.size()) + " fields",
                             line_no);
        std::int64_t weight = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1;
        builder.add_edge(fields[0], fields[1], weight);
    }
    return builder.build();
}

std::string serialize_edge_list(const CallGraph& g) {
    std::vector<const EdgeRecord*> order;
    order.reserve(g.edges().size());
    for (const auto& e : g.edges()) order.push_back(&e);
    std::sort(order.begin(), order.end(), [&](const EdgeRecord* a, const EdgeRecord* b) {
        const auto& ca = g.node_id(a->caller);
        const auto& cb = g.node_id(b->caller);
        if (ca != cb) return ca < cb;
        return g.node_id(a->callee) < g.node_id(b->callee);
    });
    std::string out;
    for (const auto* e : order) {
        out += g.node_id(e->caller);
        out += ' ';
        out += g.node_id(e->callee);
        out += ' ';
        out += std::to_string(e->weight);
        out += '\n';
    }
    return out;
}

CallGraph load_graph(const std::string& path, const std::string& format) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    std::string text = buffer.str();

    std::string fmt = format;
    if (fmt == "auto") {
        auto dot_pos = path.rfind('.');
        std::string ext = dot_pos == std::string::npos ? "" : path.substr(dot_pos + 1);
        if (ext == "dot" || ext == "gv") {
            fmt = "dot";
        } else if (ext == "edgelist" || ext == "txt" || ext == "tsv") {
            fmt = "edgelist";
        } else {
            // Content sniff: a DOT file opens with (strict) digraph/graph.
            auto first = text.find_first_not_of(" \t\r\n");
            fmt = (first != std::string::npos &&
                   (text.compare(first, 7, "digraph") == 0 ||
                    text.compare(first, 6, "strict") == 0 ||
                    text.compare(first, 5, "graph") == 0))
                      ? "dot"
                      : "edgelist";
        }
    }
    if (fmt == "dot") return parse_dot(text);
    if (fmt == "edgelist") return parse_edge_list(text);
    throw ParameterError("unknown input format: " + fmt);
}

}  // namespace callrisk

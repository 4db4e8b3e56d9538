#pragma once

#include <string>

#include "callrisk/graph.hpp"

namespace callrisk {

// Parses a DOT digraph. Subgraph/cluster wrappers, attribute lists and ports
// are tolerated; node labels are kept, every other attribute is discarded.
// Throws ParseError (with line/column) on malformed input and
// UnsupportedFormatError on an undirected `graph`.
CallGraph parse_dot(const std::string& text);

// Parses "caller callee [weight]" lines. Lines starting with '#' and blank
// lines are skipped; duplicate pairs fold by summing weights (default 1).
CallGraph parse_edge_list(const std::string& text);

// Canonical edge-list form: "caller callee weight" lines sorted
// lexicographically by (caller, callee). Isolated nodes are not representable
// in this format and are omitted.
std::string serialize_edge_list(const CallGraph& g);

// Reads a file and dispatches on format: "dot", "edgelist", or "auto"
// (by extension, falling back to content sniffing).
CallGraph load_graph(const std::string& path, const std::string& format = "auto");

}  // namespace callrisk

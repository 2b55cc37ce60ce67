#pragma once

// Oriented-graph view of a structure: one vertex per node event, one edge
// per segment, identifications as distinguished edge pairs. Also provides
// the deterministic topological segment order used by exporters.

#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "branchtime/structure.hpp"

namespace branchtime {

struct GraphVertex {
  int node = 0;
  double t = 0.0;
  NodeKind kind = NodeKind::division;
};

struct GraphEdge {
  int segment = 0;
  std::optional<int> from_node, to_node;
  double lo = 0.0, hi = 0.0;
  bool lo_closed = true, hi_closed = true;
};

struct IdentifiedPair {
  int identification = 0;
  int from_segment = 0;
  int to_segment = 0;
  double period = 0.0;
};

struct Digraph {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<IdentifiedPair> identified;
};

inline Digraph graph_of(const TemporalStructure& s) {
  Digraph g;
  g.vertices.reserve(s.nodes.size());
  for (const NodeEvent& n : s.nodes)
    g.vertices.push_back(GraphVertex{n.id, n.t, n.kind});
  g.edges.reserve(s.segments.size());
  for (const Segment& seg : s.segments)
    g.edges.push_back(GraphEdge{seg.id, seg.lo_node, seg.hi_node, seg.lo,
                                seg.hi, seg.lo_closed, seg.hi_closed});
  for (const Identification& ident : s.identifications)
    g.identified.push_back(IdentifiedPair{ident.id, ident.from_point.segment,
                                          ident.to_point.segment,
                                          ident.period});
  return g;
}

// Segments ordered so that every segment appears after the segments feeding
// it; ties resolve to the smallest id. Identifications are ignored, so the
// order exists for every validated structure.
inline std::vector<int> topological_order(const TemporalStructure& s) {
  const std::size_t n = s.segments.size();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> next(n);
  for (const NodeEvent& node : s.nodes) {
    for (int in : node.in_segments)
      for (int out : node.out_segments) {
        next[in].push_back(out);
        ++indegree[out];
      }
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : next[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  if (order.size() != n)
    throw structure_error("segment graph has a cycle; no topological order");
  return order;
}

namespace detail {

inline std::string dot_interval(const GraphEdge& e, const std::string& lo,
                                const std::string& hi) {
  std::string s;
  s.push_back(e.lo_closed ? '[' : '(');
  s += lo;
  s.push_back(',');
  s += hi;
  s.push_back(e.hi_closed ? ']' : ')');
  return s;
}

}  // namespace detail

// Deterministic DOT rendering. Dangling segment ends get synthetic point
// anchors; identified edge pairs are drawn dashed with their period.
// `format_num` renders coordinates (the CLI passes its 17-digit formatter).
template <typename Formatter>
std::string to_dot(const TemporalStructure& s, Formatter format_num) {
  Digraph g = graph_of(s);
  std::string out = "digraph timeline {\n  rankdir=LR;\n";
  for (const GraphVertex& v : g.vertices) {
    out += "  n" + std::to_string(v.node) + " [label=\"t=" + format_num(v.t) +
           " (" + (v.kind == NodeKind::division ? "division" : "sticking") +
           ")\"];\n";
  }
  for (const GraphEdge& e : g.edges) {
    if (!e.from_node)
      out += "  e" + std::to_string(e.segment) + "_src [shape=point];\n";
    if (!e.to_node)
      out += "  e" + std::to_string(e.segment) + "_snk [shape=point];\n";
  }
  for (const GraphEdge& e : g.edges) {
    std::string head = e.from_node ? "n" + std::to_string(*e.from_node)
                                   : "e" + std::to_string(e.segment) + "_src";
    std::string tail = e.to_node ? "n" + std::to_string(*e.to_node)
                                 : "e" + std::to_string(e.segment) + "_snk";
    out += "  " + head + " -> " + tail + " [label=\"" +
           detail::dot_interval(e, format_num(e.lo), format_num(e.hi)) +
           "\"];\n";
  }
  for (const IdentifiedPair& p : g.identified) {
    out += "  e" + std::to_string(p.from_segment) + "_snk -> e" +
           std::to_string(p.to_segment) + "_src [style=dashed, label=\"period=" +
           format_num(p.period) + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace branchtime

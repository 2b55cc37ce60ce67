#pragma once

// Branched-time structures: a bounded time axis split into segments by
// division events (one past, b futures), sticking events (b pasts, one
// future) and point events (b copies of a single instant), plus periodic
// identifications that glue an outgoing edge point back onto an incoming
// edge point.
//
// Segments carry explicit endpoint closedness; a division owns its event
// coordinate on every outgoing copy (closed starts, open incoming end), a
// sticking owns it on every incoming copy (closed ends, open outgoing
// start). Endpoint closedness is the single source of truth for which copy
// a boundary instant belongs to.
//
// branch_path is a construction-history address: the segment that keeps the
// trunk role at a split keeps its path, every fan segment appends one
// (node, branch) step. locate() resolves a path plus coordinate against
// these stored addresses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace branchtime {

class structure_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Horizon {
  double t_min = -10.0;
  double t_max = 10.0;
};

struct PathStep {
  int node = 0;
  int branch = 0;  // 1-based fan index at that node
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct Segment {
  int id = 0;
  double lo = 0.0, hi = 0.0;
  bool lo_closed = true, hi_closed = true;
  std::vector<PathStep> branch_path;
  std::optional<int> lo_node;  // node whose fan/trunk starts this segment
  std::optional<int> hi_node;  // node this segment runs into

  bool degenerate() const { return lo == hi; }

  bool contains(double t) const {
    if (t < lo || t > hi) return false;
    if (t == lo && !lo_closed) return false;
    if (t == hi && !hi_closed) return false;
    return true;
  }

  bool strictly_inside(double t) const { return lo < t && t < hi; }
};

enum class NodeKind { division, sticking };

struct NodeEvent {
  int id = 0;
  NodeKind kind = NodeKind::division;
  double t = 0.0;
  int branches = 2;
  std::vector<int> in_segments;
  std::vector<int> out_segments;
};

// A point of the structure: a coordinate on one specific segment. Points on
// different segments are distinct even at equal coordinates.
struct TimePoint {
  int segment = 0;
  double t = 0.0;
  friend bool operator==(const TimePoint&, const TimePoint&) = default;
  friend auto operator<=>(const TimePoint&, const TimePoint&) = default;
};

struct Identification {
  int id = 0;
  TimePoint from_point;  // on an outgoing edge (segment with no later node)
  TimePoint to_point;    // on an incoming edge (segment with no earlier node)
  double period = 0.0;   // from_point.t - to_point.t, always positive
};

struct TemporalStructure {
  Horizon horizon;
  std::vector<Segment> segments;
  std::vector<NodeEvent> nodes;
  std::vector<Identification> identifications;
  int root = 0;
  // Set by the Hausdorff-restoring quotient: all copies of a node coordinate
  // denote one shared point.
  bool shared_node_boundaries = false;
};

inline std::vector<int> branch_indices(const Segment& seg) {
  std::vector<int> out;
  out.reserve(seg.branch_path.size());
  for (const PathStep& s : seg.branch_path) out.push_back(s.branch);
  return out;
}

inline std::string format_path(const std::vector<int>& path) {
  std::string s = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(path[i]);
  }
  s.push_back(']');
  return s;
}

inline std::string format_path(const Segment& seg) {
  return format_path(branch_indices(seg));
}

inline TemporalStructure line(Horizon horizon = Horizon{}) {
  if (!(horizon.t_min < horizon.t_max) || !std::isfinite(horizon.t_min) ||
      !std::isfinite(horizon.t_max))
    throw structure_error("horizon must satisfy t_min < t_max and be finite");
  TemporalStructure s;
  s.horizon = horizon;
  Segment seg;
  seg.id = 0;
  seg.lo = horizon.t_min;
  seg.hi = horizon.t_max;
  seg.lo_closed = seg.hi_closed = true;
  s.segments.push_back(std::move(seg));
  s.root = 0;
  return s;
}

namespace detail {

inline const Segment& checked_segment(const TemporalStructure& s, int seg) {
  if (seg < 0 || seg >= static_cast<int>(s.segments.size()))
    throw structure_error("no segment with id " + std::to_string(seg));
  return s.segments[seg];
}

inline void check_split_preconditions(const TemporalStructure& s, int seg,
                                      double t, int b) {
  const Segment& target = checked_segment(s, seg);
  if (b < 2) throw structure_error("split needs at least 2 branches");
  if (!std::isfinite(t)) throw structure_error("split coordinate must be finite");
  if (target.degenerate())
    throw structure_error("cannot split a degenerate point segment");
  if (!target.strictly_inside(t))
    throw structure_error("split coordinate " + std::to_string(t) +
                          " is not strictly inside segment " +
                          std::to_string(seg));
}

// Segments attached beyond `node`, not crossing back over `except_segment`.
inline std::vector<int> cone_beyond(const TemporalStructure& s, int node,
                                    int except_segment) {
  std::vector<int> result;
  std::vector<bool> seen_seg(s.segments.size(), false);
  std::vector<bool> seen_node(s.nodes.size(), false);
  seen_seg[except_segment] = true;
  std::vector<int> node_stack{node};
  while (!node_stack.empty()) {
    int n = node_stack.back();
    node_stack.pop_back();
    if (seen_node[n]) continue;
    seen_node[n] = true;
    auto visit = [&](int seg_id) {
      if (seen_seg[seg_id]) return;
      seen_seg[seg_id] = true;
      result.push_back(seg_id);
      const Segment& sg = s.segments[seg_id];
      if (sg.lo_node && !seen_node[*sg.lo_node]) node_stack.push_back(*sg.lo_node);
      if (sg.hi_node && !seen_node[*sg.hi_node]) node_stack.push_back(*sg.hi_node);
    };
    for (int seg_id : s.nodes[n].in_segments) visit(seg_id);
    for (int seg_id : s.nodes[n].out_segments) visit(seg_id);
  }
  return result;
}

inline void replace_ref(std::vector<int>& refs, int old_id, int new_id) {
  for (int& r : refs)
    if (r == old_id) r = new_id;
}

}  // namespace detail

// Division at t on `seg`: one past, b futures. The incoming part keeps the
// segment id and its address; branch 1 carries whatever structure previously
// followed seg, the other branches run plain to the horizon.
inline TemporalStructure split_division(TemporalStructure s, int seg, double t,
                                        int b) {
  detail::check_split_preconditions(s, seg, t, b);
  const int node_id = static_cast<int>(s.nodes.size());
  Segment old = s.segments[seg];

  NodeEvent node;
  node.id = node_id;
  node.kind = NodeKind::division;
  node.t = t;
  node.branches = b;
  node.in_segments = {seg};

  Segment& in = s.segments[seg];
  in.hi = t;
  in.hi_closed = false;
  in.hi_node = node_id;

  // structure previously beyond seg's end now hangs off branch 1
  if (old.hi_node) {
    for (int cone_seg : detail::cone_beyond(s, *old.hi_node, seg)) {
      auto& path = s.segments[cone_seg].branch_path;
      path.insert(path.begin() + static_cast<std::ptrdiff_t>(old.branch_path.size()),
                  PathStep{node_id, 1});
    }
  }

  for (int k = 1; k <= b; ++k) {
    Segment out;
    out.id = static_cast<int>(s.segments.size());
    out.lo = t;
    out.lo_closed = true;
    out.lo_node = node_id;
    out.branch_path = old.branch_path;
    out.branch_path.push_back(PathStep{node_id, k});
    if (k == 1) {
      out.hi = old.hi;
      out.hi_closed = old.hi_closed;
      out.hi_node = old.hi_node;
      if (old.hi_node) {
        NodeEvent& next = s.nodes[*old.hi_node];
        detail::replace_ref(next.in_segments, seg, out.id);
      }
    } else {
      out.hi = s.horizon.t_max;
      out.hi_closed = true;
    }
    node.out_segments.push_back(out.id);
    s.segments.push_back(std::move(out));
  }
  s.nodes.push_back(std::move(node));
  return s;
}

// Sticking at t on `seg`: b pasts, one future. The outgoing part keeps the
// segment id and its address; incoming branch 1 carries whatever structure
// previously preceded seg, the other branches run plain from the horizon.
inline TemporalStructure split_sticking(TemporalStructure s, int seg, double t,
                                        int b) {
  detail::check_split_preconditions(s, seg, t, b);
  const int node_id = static_cast<int>(s.nodes.size());
  Segment old = s.segments[seg];

  NodeEvent node;
  node.id = node_id;
  node.kind = NodeKind::sticking;
  node.t = t;
  node.branches = b;
  node.out_segments = {seg};

  Segment& out = s.segments[seg];
  out.lo = t;
  out.lo_closed = false;
  out.lo_node = node_id;

  for (int k = 1; k <= b; ++k) {
    Segment in;
    in.id = static_cast<int>(s.segments.size());
    in.hi = t;
    in.hi_closed = true;
    in.hi_node = node_id;
    in.branch_path = old.branch_path;
    in.branch_path.push_back(PathStep{node_id, k});
    if (k == 1) {
      in.lo = old.lo;
      in.lo_closed = old.lo_closed;
      in.lo_node = old.lo_node;
      if (old.lo_node) {
        NodeEvent& prev = s.nodes[*old.lo_node];
        detail::replace_ref(prev.out_segments, seg, in.id);
      }
    } else {
      in.lo = s.horizon.t_min;
      in.lo_closed = true;
    }
    node.in_segments.push_back(in.id);
    s.segments.push_back(std::move(in));
  }
  s.nodes.push_back(std::move(node));
  return s;
}

// Point split at t on `seg`: b copies of the single instant t, encoded as
// degenerate segments between a division and a sticking at the same
// coordinate. The incoming part keeps the segment id; the outgoing part is a
// fresh segment with the same address (their coordinate ranges are disjoint).
inline TemporalStructure split_point(TemporalStructure s, int seg, double t,
                                     int b) {
  detail::check_split_preconditions(s, seg, t, b);
  const int div_id = static_cast<int>(s.nodes.size());
  const int stick_id = div_id + 1;
  Segment old = s.segments[seg];

  NodeEvent div;
  div.id = div_id;
  div.kind = NodeKind::division;
  div.t = t;
  div.branches = b;
  div.in_segments = {seg};

  NodeEvent stick;
  stick.id = stick_id;
  stick.kind = NodeKind::sticking;
  stick.t = t;
  stick.branches = b;

  Segment& in = s.segments[seg];
  in.hi = t;
  in.hi_closed = false;
  in.hi_node = div_id;

  for (int k = 1; k <= b; ++k) {
    Segment copy;
    copy.id = static_cast<int>(s.segments.size());
    copy.lo = copy.hi = t;
    copy.lo_closed = copy.hi_closed = true;
    copy.lo_node = div_id;
    copy.hi_node = stick_id;
    copy.branch_path = old.branch_path;
    copy.branch_path.push_back(PathStep{div_id, k});
    div.out_segments.push_back(copy.id);
    stick.in_segments.push_back(copy.id);
    s.segments.push_back(std::move(copy));
  }

  Segment tail;
  tail.id = static_cast<int>(s.segments.size());
  tail.lo = t;
  tail.lo_closed = false;
  tail.lo_node = stick_id;
  tail.hi = old.hi;
  tail.hi_closed = old.hi_closed;
  tail.hi_node = old.hi_node;
  tail.branch_path = old.branch_path;
  if (old.hi_node) {
    NodeEvent& next = s.nodes[*old.hi_node];
    detail::replace_ref(next.in_segments, seg, tail.id);
  }
  stick.out_segments = {tail.id};
  s.segments.push_back(std::move(tail));

  s.nodes.push_back(std::move(div));
  s.nodes.push_back(std::move(stick));
  return s;
}

// Glues from_point (later, on an outgoing edge) onto to_point (earlier, on an
// incoming edge), declaring the two instants to be the same event with period
// from.t - to.t.
inline TemporalStructure identify(TemporalStructure s, TimePoint from,
                                  TimePoint to) {
  const Segment& from_seg = detail::checked_segment(s, from.segment);
  const Segment& to_seg = detail::checked_segment(s, to.segment);
  if (from_seg.hi_node)
    throw structure_error("identification source must lie on an outgoing edge "
                          "(segment with no later node)");
  if (to_seg.lo_node)
    throw structure_error("identification target must lie on an incoming edge "
                          "(segment with no earlier node)");
  if (!from_seg.strictly_inside(from.t) || !to_seg.strictly_inside(to.t))
    throw structure_error("identification points must lie strictly inside "
                          "their segments");
  const double period = from.t - to.t;
  if (!(period > 0.0))
    throw structure_error("identification must glue a later point onto an "
                          "earlier one (period > 0)");
  for (const Identification& other : s.identifications) {
    for (TimePoint p : {other.from_point, other.to_point}) {
      if (p == from || p == to)
        throw structure_error("identification endpoint already in use");
    }
  }
  Identification ident;
  ident.id = static_cast<int>(s.identifications.size());
  ident.from_point = from;
  ident.to_point = to;
  ident.period = period;
  s.identifications.push_back(ident);
  return s;
}

// Resolves a construction address plus coordinate to a point. The coordinate
// must lie on the addressed segment with respect to endpoint closedness (the
// incoming side of a division does not own the event coordinate).
inline TimePoint locate(const TemporalStructure& s, const std::vector<int>& path,
                        double t) {
  bool path_seen = false;
  std::vector<int> hits;
  for (const Segment& seg : s.segments) {
    if (branch_indices(seg) != path) continue;
    path_seen = true;
    if (seg.contains(t)) hits.push_back(seg.id);
  }
  if (hits.size() == 1) return TimePoint{hits[0], t};
  if (hits.size() > 1)
    throw structure_error("ambiguous point: branch path " + format_path(path) +
                          " holds coordinate " + std::to_string(t) +
                          " on more than one segment");
  if (path_seen)
    throw structure_error("coordinate " + std::to_string(t) +
                          " does not lie on any segment with branch path " +
                          format_path(path));
  throw structure_error("no segment with branch path " + format_path(path));
}

// Canonical representative of a point. Under the boundary-sharing quotient
// all copies of a node coordinate collapse to the copy on the lowest segment
// id; otherwise the point is its own representative.
inline TimePoint canonical(const TemporalStructure& s, TimePoint p) {
  detail::checked_segment(s, p.segment);
  if (!s.shared_node_boundaries) return p;
  const Segment& seg = s.segments[p.segment];
  std::optional<int> node;
  if (p.t == seg.lo && seg.lo_node) node = seg.lo_node;
  if (p.t == seg.hi && seg.hi_node) node = seg.hi_node;
  if (!node) return p;
  const NodeEvent& n = s.nodes[*node];
  const std::vector<int>& fam =
      n.kind == NodeKind::division ? n.out_segments : n.in_segments;
  if (std::find(fam.begin(), fam.end(), p.segment) == fam.end()) return p;
  int rep = *std::min_element(fam.begin(), fam.end());
  return TimePoint{rep, p.t};
}

inline bool same_point(const TemporalStructure& s, TimePoint a, TimePoint b) {
  return canonical(s, a) == canonical(s, b);
}

struct ValidationReport {
  std::vector<std::string> failures;
  bool chronology_violating = false;
  std::size_t segment_count = 0;
  std::size_t node_count = 0;
  std::size_t identification_count = 0;

  bool ok() const { return failures.empty(); }
};

namespace detail {

// Directed cycle search over segments; identification glue edges included
// when requested.
inline bool has_directed_cycle(const TemporalStructure& s,
                               bool with_identifications) {
  const std::size_t n = s.segments.size();
  std::vector<std::vector<int>> next(n);
  for (const NodeEvent& node : s.nodes) {
    for (int in : node.in_segments)
      for (int out : node.out_segments) next[in].push_back(out);
  }
  if (with_identifications) {
    for (const Identification& ident : s.identifications)
      next[ident.from_point.segment].push_back(ident.to_point.segment);
  }
  std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
  for (std::size_t start = 0; start < n; ++start) {
    if (state[start]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{static_cast<int>(start), 0}};
    state[start] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < next[v].size()) {
        int w = next[v][i++];
        if (state[w] == 1) return true;
        if (state[w] == 0) {
          state[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        state[v] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace detail

// Structural well-formedness check. Build operations only produce valid
// structures; this guards hand-assembled or deserialized ones and computes
// the chronology verdict.
inline ValidationReport validate(const TemporalStructure& s) {
  ValidationReport report;
  report.segment_count = s.segments.size();
  report.node_count = s.nodes.size();
  report.identification_count = s.identifications.size();
  auto fail = [&](const std::string& msg) { report.failures.push_back(msg); };

  if (!(s.horizon.t_min < s.horizon.t_max) || !std::isfinite(s.horizon.t_min) ||
      !std::isfinite(s.horizon.t_max))
    fail("horizon must satisfy t_min < t_max and be finite");
  if (s.segments.empty()) {
    fail("structure has no segments");
    return report;
  }
  if (s.root < 0 || s.root >= static_cast<int>(s.segments.size()))
    fail("root segment id out of range");

  auto node_ok = [&](std::optional<int> id) {
    return !id || (*id >= 0 && *id < static_cast<int>(s.nodes.size()));
  };

  for (const Segment& seg : s.segments) {
    const std::string tag = "segment " + std::to_string(seg.id) + ": ";
    if (seg.id != &seg - s.segments.data())
      fail(tag + "id does not match position");
    if (!(seg.lo <= seg.hi)) fail(tag + "lo must not exceed hi");
    if (seg.degenerate() && !(seg.lo_closed && seg.hi_closed))
      fail(tag + "degenerate segment must be closed at both ends");
    if (seg.lo < s.horizon.t_min || seg.hi > s.horizon.t_max)
      fail(tag + "extends beyond the horizon");
    if (!node_ok(seg.lo_node) || !node_ok(seg.hi_node)) {
      fail(tag + "references a missing node");
      continue;
    }
    if (!seg.lo_node && !(seg.lo == s.horizon.t_min && seg.lo_closed))
      fail(tag + "dangling start must be closed at the horizon");
    if (!seg.hi_node && !(seg.hi == s.horizon.t_max && seg.hi_closed))
      fail(tag + "dangling end must be closed at the horizon");
    if (seg.lo_node) {
      const NodeEvent& n = s.nodes[*seg.lo_node];
      if (seg.lo != n.t) fail(tag + "start does not sit on its node coordinate");
      const auto& outs = n.out_segments;
      if (std::find(outs.begin(), outs.end(), seg.id) == outs.end())
        fail(tag + "not registered as an outgoing segment of its start node");
      bool want_closed = n.kind == NodeKind::division;
      if (seg.lo_closed != want_closed)
        fail(tag + (want_closed
                        ? "division copies must own their event coordinate"
                        : "sticking outgoing segment must not own the event "
                          "coordinate"));
    }
    if (seg.hi_node) {
      const NodeEvent& n = s.nodes[*seg.hi_node];
      if (seg.hi != n.t) fail(tag + "end does not sit on its node coordinate");
      const auto& ins = n.in_segments;
      if (std::find(ins.begin(), ins.end(), seg.id) == ins.end())
        fail(tag + "not registered as an incoming segment of its end node");
      bool want_closed = n.kind == NodeKind::sticking;
      if (seg.hi_closed != want_closed)
        fail(tag + (want_closed
                        ? "sticking copies must own their event coordinate"
                        : "division incoming segment must not own the event "
                          "coordinate"));
    }
    if (seg.lo_node && seg.hi_node) {
      const NodeEvent& a = s.nodes[*seg.lo_node];
      const NodeEvent& b = s.nodes[*seg.hi_node];
      bool strict = a.t < b.t;
      bool degenerate_hop = a.t == b.t && seg.degenerate() &&
                            a.kind == NodeKind::division &&
                            b.kind == NodeKind::sticking;
      if (!strict && !degenerate_hop)
        fail(tag + "node coordinates must increase along the segment");
    }
  }

  for (const NodeEvent& node : s.nodes) {
    const std::string tag = "node " + std::to_string(node.id) + ": ";
    if (node.id != &node - s.nodes.data()) fail(tag + "id does not match position");
    if (!(node.t > s.horizon.t_min && node.t < s.horizon.t_max))
      fail(tag + "event coordinate must lie strictly inside the horizon");
    if (node.branches < 2) fail(tag + "needs at least 2 branches");
    std::size_t want_in = node.kind == NodeKind::division
                              ? 1
                              : static_cast<std::size_t>(node.branches);
    std::size_t want_out = node.kind == NodeKind::division
                               ? static_cast<std::size_t>(node.branches)
                               : 1;
    if (node.in_segments.size() != want_in)
      fail(tag + "wrong number of incoming segments");
    if (node.out_segments.size() != want_out)
      fail(tag + "wrong number of outgoing segments");
    for (int seg_id : node.in_segments) {
      if (seg_id < 0 || seg_id >= static_cast<int>(s.segments.size()))
        fail(tag + "incoming segment id out of range");
      else if (s.segments[seg_id].hi_node != node.id)
        fail(tag + "incoming segment does not point back");
    }
    for (int seg_id : node.out_segments) {
      if (seg_id < 0 || seg_id >= static_cast<int>(s.segments.size()))
        fail(tag + "outgoing segment id out of range");
      else if (s.segments[seg_id].lo_node != node.id)
        fail(tag + "outgoing segment does not point back");
    }
  }

  if (!report.ok()) {
    // incidence is broken; graph checks below would read garbage
    report.chronology_violating = !s.identifications.empty();
    return report;
  }

  // connectivity over segment/node incidence, identifications ignored
  {
    std::vector<bool> seen(s.segments.size(), false);
    std::vector<int> stack{s.root};
    seen[s.root] = true;
    std::size_t count = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      ++count;
      const Segment& seg = s.segments[v];
      for (std::optional<int> n : {seg.lo_node, seg.hi_node}) {
        if (!n) continue;
        const NodeEvent& node = s.nodes[*n];
        for (const auto* list : {&node.in_segments, &node.out_segments})
          for (int w : *list)
            if (!seen[w]) {
              seen[w] = true;
              stack.push_back(w);
            }
      }
    }
    if (count != s.segments.size())
      fail("structure is not connected");
  }

  if (detail::has_directed_cycle(s, false))
    fail("segment graph must be acyclic apart from identifications");

  for (const Identification& ident : s.identifications) {
    const std::string tag = "identification " + std::to_string(ident.id) + ": ";
    bool segs_ok = true;
    for (TimePoint p : {ident.from_point, ident.to_point}) {
      if (p.segment < 0 || p.segment >= static_cast<int>(s.segments.size())) {
        fail(tag + "references a missing segment");
        segs_ok = false;
      }
    }
    if (!segs_ok) continue;
    const Segment& from_seg = s.segments[ident.from_point.segment];
    const Segment& to_seg = s.segments[ident.to_point.segment];
    if (from_seg.hi_node) fail(tag + "source must lie on an outgoing edge");
    if (to_seg.lo_node) fail(tag + "target must lie on an incoming edge");
    if (!from_seg.strictly_inside(ident.from_point.t) ||
        !to_seg.strictly_inside(ident.to_point.t))
      fail(tag + "points must lie strictly inside their segments");
    if (!(ident.period > 0.0) ||
        ident.period != ident.from_point.t - ident.to_point.t)
      fail(tag + "period must equal from minus to and be positive");
  }
  {
    std::set<TimePoint> used;
    for (const Identification& ident : s.identifications) {
      for (TimePoint p : {ident.from_point, ident.to_point}) {
        if (!used.insert(p).second)
          fail("identification endpoint reused: segment " +
               std::to_string(p.segment));
      }
    }
  }

  report.chronology_violating = detail::has_directed_cycle(s, true);
  return report;
}

}  // namespace branchtime

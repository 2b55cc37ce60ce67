#pragma once

// Chronological order on branched time. The relation compares raw
// coordinates, so it is always reflexive and transitive on identification-
// free structures, while copies of one instant break antisymmetry. On
// structures with identifications the relation stops being a preorder
// altogether and every query refuses.
//
// Inseparable pairs are the topological fingerprint of branching: exactly
// the copies of each event coordinate across a node's fan segments. Merging
// each fan family back into one shared boundary point (the quotient) makes
// the structure Hausdorff again without changing its segments.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "branchtime/structure.hpp"

namespace branchtime {

class chronology_error : public structure_error {
 public:
  using structure_error::structure_error;
};

namespace detail {

inline void require_no_identifications(const TemporalStructure& s) {
  if (!s.identifications.empty())
    throw chronology_error("chronology-violating: relation is not a preorder");
}

inline void require_point(const TemporalStructure& s, TimePoint p) {
  const Segment& seg = checked_segment(s, p.segment);
  if (!seg.contains(p.t))
    throw structure_error("coordinate " + std::to_string(p.t) +
                          " does not lie on segment " +
                          std::to_string(p.segment));
}

}  // namespace detail

// Whether p happens no later than q. Refuses on structures with
// identifications: the relation is not a preorder there.
inline bool chron_leq(const TemporalStructure& s, TimePoint p, TimePoint q) {
  detail::require_no_identifications(s);
  detail::require_point(s, p);
  detail::require_point(s, q);
  return p.t <= q.t;
}

// A maximal coordinate interval whose instants are carried by the same set
// of two or more segments: one family of nontrivial equivalence classes of
// the "equal coordinate" relation.
struct EquivClassFamily {
  double lo = 0.0, hi = 0.0;
  bool lo_closed = true, hi_closed = true;
  std::vector<int> segments;

  int copies() const { return static_cast<int>(segments.size()); }
};

namespace detail {

// Sweep cells: each node coordinate and horizon end is a point cell, the
// gaps between consecutive breakpoints are open cells. No segment endpoint
// lies inside an open cell, so interval membership is uniform across it.
struct SweepCell {
  double lo = 0.0, hi = 0.0;  // lo == hi for point cells
  std::vector<int> segments;  // covering segments, ascending
};

inline std::vector<SweepCell> sweep_cells(const TemporalStructure& s,
                                          bool canonicalize) {
  std::vector<double> breaks{s.horizon.t_min, s.horizon.t_max};
  for (const NodeEvent& n : s.nodes) breaks.push_back(n.t);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<SweepCell> cells;
  auto add_point_cell = [&](double t) {
    SweepCell cell{t, t, {}};
    std::set<TimePoint> points;
    for (const Segment& seg : s.segments) {
      if (!seg.contains(t)) continue;
      TimePoint p{seg.id, t};
      points.insert(canonicalize ? canonical(s, p) : p);
    }
    for (const TimePoint& p : points) cell.segments.push_back(p.segment);
    cells.push_back(std::move(cell));
  };
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    add_point_cell(breaks[i]);
    if (i + 1 < breaks.size()) {
      SweepCell cell{breaks[i], breaks[i + 1], {}};
      double mid = breaks[i] + (breaks[i + 1] - breaks[i]) / 2.0;
      for (const Segment& seg : s.segments)
        if (seg.strictly_inside(mid)) cell.segments.push_back(seg.id);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace detail

// Families of nontrivial equal-coordinate classes, as maximal intervals.
// Identification-free structures only.
inline std::vector<EquivClassFamily> chron_equiv_classes(
    const TemporalStructure& s) {
  detail::require_no_identifications(s);
  std::vector<detail::SweepCell> cells = detail::sweep_cells(s, false);
  std::vector<EquivClassFamily> families;
  std::size_t i = 0;
  while (i < cells.size()) {
    if (cells[i].segments.size() < 2) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < cells.size() &&
           cells[j + 1].segments == cells[i].segments)
      ++j;
    EquivClassFamily family;
    family.segments = cells[i].segments;
    family.lo = cells[i].lo;
    family.hi = cells[j].hi;
    family.lo_closed = cells[i].lo == cells[i].hi;   // run starts on a point cell
    family.hi_closed = cells[j].lo == cells[j].hi;   // run ends on a point cell
    families.push_back(std::move(family));
    i = j + 1;
  }
  return families;
}

// The inseparable pairs: for every node, each unordered pair of copies of
// its event coordinate across the fan segments. Empty once boundaries are
// shared by the quotient.
inline std::vector<std::pair<TimePoint, TimePoint>> hausdorff_pairs(
    const TemporalStructure& s) {
  std::vector<std::pair<TimePoint, TimePoint>> pairs;
  if (s.shared_node_boundaries) return pairs;
  std::set<std::pair<TimePoint, TimePoint>> seen;
  for (const NodeEvent& node : s.nodes) {
    const std::vector<int>& fam = node.kind == NodeKind::division
                                      ? node.out_segments
                                      : node.in_segments;
    std::vector<int> sorted = fam;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      for (std::size_t j = i + 1; j < sorted.size(); ++j) {
        std::pair<TimePoint, TimePoint> pair{TimePoint{sorted[i], node.t},
                                             TimePoint{sorted[j], node.t}};
        if (seen.insert(pair).second) pairs.push_back(pair);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

inline bool is_hausdorff(const TemporalStructure& s) {
  return hausdorff_pairs(s).empty();
}

// Hausdorff-restoring quotient: merges every fan family of event-coordinate
// copies into one shared boundary point. Segments are preserved; only point
// identity at node boundaries changes. Identification-free structures only.
inline TemporalStructure mccabe_quotient(TemporalStructure s) {
  detail::require_no_identifications(s);
  s.shared_node_boundaries = true;
  return s;
}

struct ChronRelationReport {
  bool is_preorder = false;
  bool is_partial_order = false;
  std::optional<std::pair<TimePoint, TimePoint>> witness_pair;
  bool chronology_violating = false;
};

// Summary of the order-theoretic status of the relation on s. The witness
// pair is present exactly when the relation is a preorder but antisymmetry
// fails; it names two distinct points carrying the same coordinate.
inline ChronRelationReport chron_relation_report(const TemporalStructure& s) {
  ChronRelationReport report;
  report.chronology_violating = detail::has_directed_cycle(s, true);
  report.is_preorder = !report.chronology_violating;
  if (!report.is_preorder) return report;

  std::vector<detail::SweepCell> cells = detail::sweep_cells(s, true);
  report.is_partial_order = true;
  for (const detail::SweepCell& cell : cells) {
    if (cell.segments.size() < 2) continue;
    report.is_partial_order = false;
    double t = cell.lo == cell.hi ? cell.lo : cell.lo + (cell.hi - cell.lo) / 2.0;
    report.witness_pair = {TimePoint{cell.segments[0], t},
                           TimePoint{cell.segments[1], t}};
    break;
  }
  return report;
}

}  // namespace branchtime

#pragma once
// Text output: 17-significant-digit numbers, trajectory CSV, and
// line-oriented consistency reports.  Everything here is deterministic so
// repeated runs produce byte-identical files.

#include <charconv>
#include <ostream>
#include <string>

#include "branchtime/graph.hpp"
#include "branchtime/solver.hpp"
#include "branchtime/structure.hpp"

namespace branchtime {

// 17 significant digits reproduce any double exactly on read-back.
inline std::string format_double(double v) {
  char buf[48];
  auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Header `segment,branch_path,t,x`, one row per sample, rows grouped by
// segment in topological order and ascending in t within a segment.  The
// branch path is quoted since it contains commas.
inline void write_trajectory_csv(std::ostream& os, const TemporalStructure& s,
                                 const Solution& sol) {
  os << "segment,branch_path,t,x\n";
  for (int seg : topological_order(s)) {
    const Trajectory& traj = sol.trajectories[seg];
    const std::string path = "\"" + format_path(s.segments[seg]) + "\"";
    for (std::size_t i = 0; i < traj.ts.size(); ++i) {
      os << seg << ',' << path << ',' << format_double(traj.ts[i]) << ','
         << format_double(traj.xs[i]) << '\n';
    }
  }
}

// `key: value` lines with a stable `status:` first line; only the fields the
// verdict actually involves are printed.
inline void write_report(std::ostream& os, const ConsistencyReport& r) {
  os << "status: " << to_string(r.status) << '\n';
  if (r.node) os << "node: " << *r.node << '\n';
  if (r.identification) os << "identification: " << *r.identification << '\n';
  if (r.segment) os << "segment: " << *r.segment << '\n';
  if (r.at) {
    os << "at_segment: " << r.at->segment << '\n';
    os << "at_t: " << format_double(r.at->t) << '\n';
  }
  if (r.value_a) os << "value_a: " << format_double(*r.value_a) << '\n';
  if (r.value_b) os << "value_b: " << format_double(*r.value_b) << '\n';
  if (r.gap) os << "gap: " << format_double(*r.gap) << '\n';
  if (r.threshold) os << "threshold: " << format_double(*r.threshold) << '\n';
}

}  // namespace branchtime

#pragma once

// Shared test utilities: branch relabeling and small builders.

#include <numeric>
#include <random>
#include <vector>

#include "branchtime/structure.hpp"

namespace testutil {

// Permutes the fan branches of one node: perm is 1-based, perm[k-1] is the
// new index of branch k. Produces the isomorphic relabeled structure.
inline branchtime::TemporalStructure permute_branches(
    branchtime::TemporalStructure s, int node, const std::vector<int>& perm) {
  branchtime::NodeEvent& n = s.nodes[node];
  auto& fans = n.kind == branchtime::NodeKind::division ? n.out_segments
                                                        : n.in_segments;
  std::vector<int> reordered(fans.size());
  for (std::size_t k = 0; k < fans.size(); ++k)
    reordered[perm[k] - 1] = fans[k];
  fans = reordered;
  for (branchtime::Segment& seg : s.segments)
    for (branchtime::PathStep& step : seg.branch_path)
      if (step.node == node) step.branch = perm[step.branch - 1];
  return s;
}

inline std::vector<int> random_permutation(int n, std::mt19937& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

// All maximal directed chains of segments, each a complete unbranched
// timeline through the structure (identifications ignored).
inline std::vector<std::vector<int>> maximal_chains(
    const branchtime::TemporalStructure& s) {
  std::vector<std::vector<int>> chains;
  std::vector<int> current;
  auto extend = [&](auto&& self, int seg) -> void {
    current.push_back(seg);
    const branchtime::Segment& segment = s.segments[seg];
    if (!segment.hi_node) {
      chains.push_back(current);
    } else {
      for (int next : s.nodes[*segment.hi_node].out_segments) self(self, next);
    }
    current.pop_back();
  };
  for (const branchtime::Segment& seg : s.segments)
    if (!seg.lo_node) extend(extend, seg.id);
  return chains;
}

}  // namespace testutil

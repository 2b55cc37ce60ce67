// Acceptance suite: one pass/fail line per criterion, library-level, with
// every tolerance pinned right here.  Exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "branchtime/expr.hpp"
#include "branchtime/order.hpp"
#include "branchtime/solver.hpp"
#include "branchtime/structure.hpp"

using namespace branchtime;

namespace {

constexpr double kE = 2.7182818284590452354;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double kValueTol = 1e-6;        // analytic end-value agreement
constexpr double kGapTol = 1e-12;         // exactness of reported gaps
constexpr double kSharedCoordTol = 2e-6;  // sibling agreement at shared ts
constexpr double kHolonomyTol = 1e-6;     // loop gap agreement
constexpr double kCircleDevTol = 2e-6;    // equilibrium drift around a circle
constexpr double kBifurcationTol = 1e-6;  // t_bif agreement
constexpr double kRatioLo = 12.0;         // 4th-order halving-error window
constexpr double kRatioHi = 20.0;

std::string status_text(SolveStatus s) { return to_string(s); }

std::string show(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void expect(bool ok, const std::string& detail) {
  if (!ok) throw std::runtime_error(detail);
}

void expect_near(double got, double want, double tol, const std::string& what) {
  expect(std::abs(got - want) <= tol, what + ": got " + show(got) +
                                          ", want " + show(want) + " within " +
                                          show(tol));
}

TemporalStructure two_way_split() { return split_division(line(), 0, 0.0, 2); }

// Root split at t=0, branch [1] split at t=1, branch [1,1] split at t=2,
// all three-way: ten segments, seven leaves.
TemporalStructure seven_leaf_tree() {
  TemporalStructure s = split_division(line(), 0, 0.0, 3);
  s = split_division(std::move(s), 1, 1.0, 3);
  s = split_division(std::move(s), 4, 2.0, 3);
  return s;
}

bool same_prefix(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.ts.size(), b.ts.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a.ts[i] != b.ts[i] || a.xs[i] != b.xs[i]) return false;
  return n > 0;
}

void criterion_division_consistency() {
  TemporalStructure s = two_way_split();
  const Expr f = parse("x");

  SolveResult ok = solve(
      s, CauchyProblem{f, {{locate(s, {1}, 0.0), 1.0},
                           {locate(s, {2}, 0.0), 1.0}}});
  expect(ok.well_posed(), "equal copy data must be well-posed, got status " +
                              status_text(ok.report.status));
  expect_near(ok.solution->value(locate(s, {1}, 1.0)), kE, kValueTol,
              "x at t=1 on branch 1");
  expect_near(ok.solution->value(locate(s, {2}, 1.0)), kE, kValueTol,
              "x at t=1 on branch 2");

  SolveResult bad = solve(
      s, CauchyProblem{f, {{locate(s, {1}, 0.0), 1.0},
                           {locate(s, {2}, 0.0), 1.5}}});
  expect(bad.report.status == SolveStatus::InconsistentInitialConditions,
         "unequal copy data must be inconsistent, got status " +
             status_text(bad.report.status));
  expect(bad.report.gap.has_value(), "inconsistency must report its gap");
  expect_near(*bad.report.gap, 0.5, kGapTol, "copy-data gap");
}

void criterion_retrodiction() {
  TemporalStructure s = two_way_split();
  SolveResult r = solve(
      s, CauchyProblem{parse("x"), {{locate(s, {1}, 0.5), 2.0}}});
  expect(r.well_posed(), "single mid-branch seed must be well-posed");

  const Trajectory& b1 = r.solution->at(locate(s, {1}, 0.5).segment);
  const Trajectory& b2 = r.solution->at(locate(s, {2}, 0.5).segment);
  std::map<double, double> on_b1;
  for (std::size_t i = 0; i < b1.ts.size(); ++i) on_b1[b1.ts[i]] = b1.xs[i];
  std::size_t shared = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < b2.ts.size(); ++i) {
    auto hit = on_b1.find(b2.ts[i]);
    if (hit == on_b1.end()) continue;
    ++shared;
    worst = std::max(worst, std::abs(hit->second - b2.xs[i]));
  }
  expect(shared >= 100, "branches must share many exact grid coordinates");
  expect(worst <= kSharedCoordTol,
         "sibling deviation " + show(worst) + " exceeds " +
             show(kSharedCoordTol) + " across " + std::to_string(shared) +
             " shared coordinates");
}

void criterion_sticking_merge() {
  TemporalStructure s = split_sticking(line(), 0, 0.0, 2);
  const Expr f = parse("x");

  SolveResult ok = solve(
      s, CauchyProblem{f, {{locate(s, {1}, 0.0), 3.0},
                           {locate(s, {2}, 0.0), 3.0}}});
  expect(ok.well_posed(), "equal past data must merge, got status " +
                              status_text(ok.report.status));

  SolveResult bad = solve(
      s, CauchyProblem{f, {{locate(s, {1}, 0.0), 3.0},
                           {locate(s, {2}, 0.0), 3.0 + 1e-3}}});
  expect(bad.report.status == SolveStatus::StickingMismatch,
         "unequal past data must mismatch, got status " +
             status_text(bad.report.status));
}

void criterion_tree_uniqueness() {
  TemporalStructure s = seven_leaf_tree();
  SolveResult r = solve(
      s, CauchyProblem{parse("x*(1-x)"), {{locate(s, {}, -2.0), 0.5}}});
  expect(r.well_posed(), "a single seed on a tree must be well-posed");

  for (const NodeEvent& node : s.nodes) {
    const auto& fan = node.out_segments;
    for (std::size_t i = 1; i < fan.size(); ++i)
      expect(same_prefix(r.solution->at(fan[0]), r.solution->at(fan[i])),
             "siblings of node " + std::to_string(node.id) +
                 " must agree bitwise over their shared span");
  }

  // Logistic flow from x(-2) = 1/2 is x(t) = 1 / (1 + exp(-(t + 2))).
  std::size_t leaves = 0;
  for (const Segment& seg : s.segments) {
    if (seg.hi_node || seg.hi != 10.0) continue;
    ++leaves;
    expect_near(r.solution->value(TimePoint{seg.id, 10.0}),
                1.0 / (1.0 + std::exp(-12.0)), kValueTol,
                "leaf value on segment " + std::to_string(seg.id));
  }
  expect(leaves == 7, "tree must have exactly seven leaves, found " +
                          std::to_string(leaves));
}

void criterion_circle_holonomy() {
  CircleOutcome drift = solve_circle(0.0, kTwoPi, parse("1"), 0.0, 0.0);
  expect(drift.report.status == SolveStatus::LoopInconsistent,
         "unit drift around a circle must be inconsistent, got status " +
             status_text(drift.report.status));
  expect(drift.report.gap.has_value(), "holonomy verdict must carry a gap");
  expect_near(*drift.report.gap, kTwoPi, kHolonomyTol, "holonomy gap");

  CircleOutcome still = solve_circle(0.0, kTwoPi, parse("x*(1-x)"), 0.0, 1.0);
  expect(still.report.status == SolveStatus::WellPosed,
         "an equilibrium around a circle must close up, got status " +
             status_text(still.report.status));
  double dev = 0.0;
  for (double x : still.trajectory.xs) dev = std::max(dev, std::abs(x - 1.0));
  expect(dev <= kCircleDevTol,
         "equilibrium drift " + show(dev) + " exceeds " + show(kCircleDevTol));
}

void criterion_identified_loop() {
  TemporalStructure s = two_way_split();
  s = identify(std::move(s), locate(s, {1}, std::numbers::pi),
               locate(s, {}, -std::numbers::pi));

  SolveResult flat = solve(
      s, CauchyProblem{parse("0"), {{locate(s, {}, -5.0), 4.0}}});
  expect(flat.well_posed(), "a constant field must close the loop, got " +
                                status_text(flat.report.status));

  SolveResult drift = solve(
      s, CauchyProblem{parse("1"), {{locate(s, {}, -5.0), 0.0}}});
  expect(drift.report.status == SolveStatus::LoopInconsistent,
         "unit drift must break the loop, got status " +
             status_text(drift.report.status));
  expect(drift.report.gap.has_value(), "loop verdict must carry a gap");
  expect_near(*drift.report.gap, kTwoPi, kHolonomyTol, "identification gap");
}

void criterion_separation_counts() {
  TemporalStructure s2 = two_way_split();
  expect(hausdorff_pairs(s2).size() == 1,
         "a two-way split must have exactly one inseparable pair");
  expect(hausdorff_pairs(mccabe_quotient(s2)).empty(),
         "the quotient must remove every inseparable pair");
  TemporalStructure s3 = split_division(line(), 0, 0.0, 3);
  expect(hausdorff_pairs(s3).size() == 3,
         "a three-way split must have three inseparable pairs");
}

void criterion_preorder_only() {
  TemporalStructure s = two_way_split();
  const TimePoint zero1 = locate(s, {1}, 0.0);
  const TimePoint zero2 = locate(s, {2}, 0.0);
  expect(chron_leq(s, zero1, zero2) && chron_leq(s, zero2, zero1) &&
             !(zero1 == zero2),
         "the copies of t=0 must compare both ways yet stay distinct");

  TemporalStructure mixed = split_sticking(two_way_split(), 1, 4.0, 2);
  std::mt19937 rng(20260815);
  std::uniform_int_distribution<int> pick_segment(
      0, static_cast<int>(mixed.segments.size()) - 1);
  auto sample = [&] {
    const Segment& seg = mixed.segments[pick_segment(rng)];
    std::uniform_real_distribution<double> pick_t(seg.lo, seg.hi);
    return TimePoint{seg.id, seg.degenerate() ? seg.lo : pick_t(rng)};
  };
  for (int i = 0; i < 1000; ++i) {
    const TimePoint a = sample(), b = sample(), c = sample();
    expect(chron_leq(mixed, a, a), "reflexivity failed");
    if (chron_leq(mixed, a, b) && chron_leq(mixed, b, c))
      expect(chron_leq(mixed, a, c), "transitivity failed");
  }
}

void criterion_multihistory_rewrite() {
  TemporalStructure s = line();
  SolveResult base = solve(
      s, CauchyProblem{parse("x"), {{locate(s, {}, 0.0), 1.0}}});
  expect(base.well_posed(), "the base history must solve");
  const TimePoint cut = locate(s, {}, 1.0);

  MultihistoryOutcome changed =
      rewrite_history(s, *base.solution, cut, 5.0);
  expect(!changed.branch1_solution.at(changed.branch1).empty() &&
             !changed.branch2_solution.at(changed.branch2).empty(),
         "both branches must carry their own solutions");
  expect(changed.joint.status == SolveStatus::InconsistentInitialConditions,
         "a rewritten past must be jointly inconsistent, got status " +
             status_text(changed.joint.status));

  MultihistoryOutcome kept =
      rewrite_history(s, *base.solution, cut, changed.x1);
  expect(kept.joint.status == SolveStatus::WellPosed,
         "an unchanged past must stay jointly well-posed, got status " +
             status_text(kept.joint.status));
  const Trajectory& original = base.solution->at(0);
  const Trajectory& branch1 = kept.branch1_solution.at(kept.branch1);
  expect(!branch1.empty(), "branch 1 must carry the original history");
  const std::size_t offset = original.ts.size() - branch1.ts.size();
  bool equal = true;
  for (std::size_t i = 0; i < branch1.ts.size(); ++i)
    if (branch1.ts[i] != original.ts[offset + i] ||
        branch1.xs[i] != original.xs[offset + i])
      equal = false;
  expect(equal, "branch 1 must equal the original solution exactly");
}

void criterion_bifurcating_paths() {
  BifurcationOutcome out = dual_continuations(parse("1"), -1.0, 0.0, 0.0);
  expect_near(out.t_bif, 1.0, kBifurcationTol, "bifurcation instant");
  expect(out.first.copy != out.second.copy,
         "continuations must enter distinct copies");
  expect(out.first.ts == out.second.ts && out.first.xs == out.second.xs,
         "continuations must agree as real-valued paths");
  bool reaches = false;
  for (std::size_t i = 0; i < out.first.ts.size(); ++i)
    if (out.first.ts[i] >= out.t_bif && out.first.xs[i] >= 0.0) reaches = true;
  expect(reaches, "the paths must continue past the bifurcation");
}

void criterion_integrator_order() {
  const Expr f = parse("x");
  SolverConfig coarse, fine;
  coarse.step = 2e-3;
  fine.step = 1e-3;
  const double err_coarse =
      std::abs(integrate_segment(f, 0.0, 1.0, 1.0, coarse).xs.back() - kE);
  const double err_fine =
      std::abs(integrate_segment(f, 0.0, 1.0, 1.0, fine).xs.back() - kE);
  const double ratio = err_coarse / err_fine;
  expect(ratio >= kRatioLo && ratio <= kRatioHi,
         "halving-error ratio " + show(ratio) + " outside [" + show(kRatioLo) +
             ", " + show(kRatioHi) + "]");
}

struct Criterion {
  const char* title;
  std::function<void()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"division consistency: equal copy data solve, unequal data gap",
       criterion_division_consistency},
      {"retrodiction: one mid-branch seed re-predicts the sibling",
       criterion_retrodiction},
      {"sticking merge: equal pasts fuse, unequal pasts mismatch",
       criterion_sticking_merge},
      {"tree uniqueness: one seed, bitwise siblings, logistic leaves",
       criterion_tree_uniqueness},
      {"circle holonomy: drift breaks the loop, equilibrium closes it",
       criterion_circle_holonomy},
      {"identified loop: constant field closes, unit drift gaps by 2*pi",
       criterion_identified_loop},
      {"separation counts: one pair per two-way split, none after quotient",
       criterion_separation_counts},
      {"preorder only: copies compare both ways; reflexive and transitive",
       criterion_preorder_only},
      {"multihistory rewrite: branches solve alone, disagree jointly",
       criterion_multihistory_rewrite},
      {"bifurcating paths: equal until t_bif, distinct copies after",
       criterion_bifurcating_paths},
      {"integrator order: halving the step divides the error ~16x",
       criterion_integrator_order},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const std::string label =
        "criterion " + std::to_string(i + 1) + ": " + criteria[i].title;
    try {
      criteria[i].body();
      std::cout << "PASS " << label << '\n';
    } catch (const std::exception& e) {
      ++failed;
      std::cout << "FAIL " << label << " — " << e.what() << '\n';
    }
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}

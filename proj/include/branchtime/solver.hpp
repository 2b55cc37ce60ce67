#pragma once
// Cauchy problems ẋ = f(x) on branched timelines.
//
// The integrator is a fixed-step classical RK4 on purpose: a deterministic
// step sequence makes sibling trajectories bitwise identical and keeps every
// consistency verdict reproducible run to run.  Accuracy is the business of
// the convergence-order test, not of an adaptive controller.
//
// Every consistency comparison uses |a - b| <= tol_abs + tol_rel*max(|a|,|b|).
// Where the comparison happens decides the verdict: disagreeing values at a
// division's copies are inconsistent initial data, disagreeing pasts at a
// sticking cannot merge, and a loop whose endpoints disagree has nonzero
// holonomy.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "branchtime/expr.hpp"
#include "branchtime/structure.hpp"

namespace branchtime {

struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the state leaves the trusted range: |x| beyond blowup_cap, or
// an integrator stage evaluating to a non-finite value.
struct blowup_error : solver_error {
  blowup_error(double t_, double x_)
      : solver_error("solution blew up near t=" + std::to_string(t_)),
        t(t_),
        x(x_) {}
  double t;
  double x;
};

struct SolverConfig {
  double step = 1e-3;        // RK4 step; the final step of a sweep is shortened
  double tol_abs = 1e-6;
  double tol_rel = 1e-9;
  double blowup_cap = 1e12;  // abort once |x| exceeds this
};

// Sweeps over the identification list before giving up on a fixed point.
// One pass settles any deterministic scalar flow; the rest are insurance.
inline constexpr int kMaxLoopPasses = 4;

inline double tolerance_threshold(double a, double b, const SolverConfig& cfg) {
  return cfg.tol_abs + cfg.tol_rel * std::max(std::abs(a), std::abs(b));
}

inline bool within_tolerance(double a, double b, const SolverConfig& cfg) {
  return std::abs(a - b) <= tolerance_threshold(a, b, cfg);
}

struct Condition {
  TimePoint point;
  double x = 0.0;
};

struct CauchyProblem {
  Expr f;
  std::vector<Condition> conditions;  // nonempty, pairwise distinct points
};

enum class SolveStatus {
  WellPosed,
  InconsistentInitialConditions,
  StickingMismatch,
  LoopInconsistent,
  Blowup,
  Unreached,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::WellPosed: return "WellPosed";
    case SolveStatus::InconsistentInitialConditions:
      return "InconsistentInitialConditions";
    case SolveStatus::StickingMismatch: return "StickingMismatch";
    case SolveStatus::LoopInconsistent: return "LoopInconsistent";
    case SolveStatus::Blowup: return "Blowup";
    case SolveStatus::Unreached: return "Unreached";
  }
  return "?";
}

// How a segment's trajectory came to be known.
enum class Provenance {
  Seeded,           // anchored at one of the problem's own conditions
  Forward,          // launched forward from a node value
  Retrodicted,      // integrated backward from a node value
  CopiedToSibling,  // launched from a division value supplied by a sibling copy
  Glued,            // received through an identification
};

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Seeded: return "seeded";
    case Provenance::Forward: return "forward";
    case Provenance::Retrodicted: return "retrodicted";
    case Provenance::CopiedToSibling: return "copied-to-sibling";
    case Provenance::Glued: return "glued";
  }
  return "?";
}

// Raw integrator output in sweep order: ts run from t0 toward t1, so they
// descend when t1 < t0.
struct SampledPath {
  std::vector<double> ts;
  std::vector<double> xs;
};

// Ascending per-segment samples; both endpoints are always sampled (an open
// endpoint carries the one-sided limit value, which is what crosses the
// adjacent node).  Between samples the trajectory reads by linear
// interpolation.
struct Trajectory {
  int segment = -1;
  std::vector<double> ts;
  std::vector<double> xs;

  bool empty() const { return ts.empty(); }

  double value_at(double t) const {
    if (empty()) throw solver_error("trajectory has no samples");
    if (t < ts.front() || t > ts.back())
      throw solver_error("t outside the sampled range");
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    if (hi < ts.size() && ts[hi] == t) return xs[hi];
    std::size_t lo = hi - 1;
    double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return xs[lo] + w * (xs[hi] - xs[lo]);
  }
};

// Per-segment trajectories of one well-posed problem; `trajectories` and
// `provenance` are indexed by segment id.  A provenance slot is meaningful
// only where the trajectory is non-empty.
struct Solution {
  Expr f;
  std::vector<Trajectory> trajectories;
  std::vector<Provenance> provenance;

  const Trajectory& at(int segment) const {
    if (segment < 0 || segment >= static_cast<int>(trajectories.size()) ||
        trajectories[segment].empty())
      throw solver_error("no trajectory for segment " + std::to_string(segment));
    return trajectories[segment];
  }

  double value(TimePoint p) const { return at(p.segment).value_at(p.t); }
};

// Verdict plus the offending location and the pair of conflicting values.
// All optionals are set as applicable whenever status != WellPosed.
struct ConsistencyReport {
  SolveStatus status = SolveStatus::WellPosed;
  std::optional<int> node;            // division/sticking where values clashed
  std::optional<int> identification;  // gluing whose holonomy failed to close
  std::optional<int> segment;         // segment of a blow-up or unreached gap
  std::optional<TimePoint> at;        // sample where the conflict surfaced
  std::optional<double> value_a;      // established value (or last state)
  std::optional<double> value_b;      // arriving value
  std::optional<double> gap;          // |value_a - value_b|
  std::optional<double> threshold;    // tolerance the gap was held against
};

struct SolveResult {
  ConsistencyReport report;
  std::optional<Solution> solution;  // present iff report.status == WellPosed

  bool well_posed() const { return report.status == SolveStatus::WellPosed; }
};

namespace detail {

inline void check_config(const SolverConfig& cfg) {
  if (!(cfg.step > 0.0)) throw solver_error("step must be positive");
  if (!(cfg.tol_abs > 0.0)) throw solver_error("tol_abs must be positive");
  if (!(cfg.tol_rel >= 0.0)) throw solver_error("tol_rel must be nonnegative");
  if (!(cfg.blowup_cap > 0.0)) throw solver_error("blowup_cap must be positive");
}

}  // namespace detail

// Classical RK4 from (t0, x0) to t1 with fixed signed step; t1 < t0 runs the
// sweep backward.  Grid times are t0 + k*step (recomputed, not accumulated);
// the final step is shortened to land exactly on t1.  Samples are recorded at
// every step, endpoints included.
inline SampledPath integrate_segment(const Expr& f, double t0, double x0,
                                     double t1, const SolverConfig& cfg) {
  detail::check_config(cfg);
  if (!f.valid()) throw solver_error("no field expression");
  if (!std::isfinite(t0) || !std::isfinite(t1))
    throw solver_error("non-finite time bound");
  if (!std::isfinite(x0) || std::abs(x0) > cfg.blowup_cap)
    throw blowup_error(t0, x0);

  SampledPath path;
  path.ts.push_back(t0);
  path.xs.push_back(x0);
  if (t1 == t0) return path;

  const double h = t1 > t0 ? cfg.step : -cfg.step;
  double t = t0;
  double x = x0;
  for (long k = 1; t != t1; ++k) {
    double next = t0 + static_cast<double>(k) * h;
    if ((h > 0.0 && next >= t1) || (h < 0.0 && next <= t1) || next == t)
      next = t1;
    const double hh = next - t;
    double k1, k2, k3, k4;
    if (!f.try_eval(x, k1)) throw blowup_error(t, x);
    if (!f.try_eval(x + 0.5 * hh * k1, k2)) throw blowup_error(t, x);
    if (!f.try_eval(x + 0.5 * hh * k2, k3)) throw blowup_error(t, x);
    if (!f.try_eval(x + hh * k3, k4)) throw blowup_error(t, x);
    x = x + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(x) || std::abs(x) > cfg.blowup_cap)
      throw blowup_error(next, x);
    path.ts.push_back(next);
    path.xs.push_back(x);
    t = next;
  }
  return path;
}

namespace detail {

// Ascending trajectory produced by sweeping from an anchor value somewhere on
// the segment toward both endpoints.  The anchor sample appears exactly once.
inline Trajectory anchored_trajectory(const Expr& f, const Segment& seg,
                                      double t_anchor, double x_anchor,
                                      const SolverConfig& cfg) {
  Trajectory out;
  out.segment = seg.id;
  if (seg.degenerate()) {
    out.ts = {seg.lo};
    out.xs = {x_anchor};
    return out;
  }
  if (t_anchor > seg.lo) {
    SampledPath back = integrate_segment(f, t_anchor, x_anchor, seg.lo, cfg);
    for (std::size_t i = back.ts.size(); i-- > 0;) {
      out.ts.push_back(back.ts[i]);
      out.xs.push_back(back.xs[i]);
    }
  } else {
    out.ts.push_back(t_anchor);
    out.xs.push_back(x_anchor);
  }
  if (t_anchor < seg.hi) {
    SampledPath fwd = integrate_segment(f, t_anchor, x_anchor, seg.hi, cfg);
    for (std::size_t i = 1; i < fwd.ts.size(); ++i) {
      out.ts.push_back(fwd.ts[i]);
      out.xs.push_back(fwd.xs[i]);
    }
  }
  return out;
}

// Work-list propagation engine behind solve().  Each segment is anchored at
// most once; later values arriving at a node are consistency checks, never
// re-anchors, so the result is independent of tolerance-level luck and fully
// deterministic (seeds are processed in segment order, the queue is FIFO).
class SolveDriver {
 public:
  SolveDriver(const TemporalStructure& s, const CauchyProblem& p,
              const SolverConfig& cfg)
      : s_(s), p_(p), cfg_(cfg) {}

  SolveResult run() {
    check_config(cfg_);
    validate_problem();
    trajectories_.resize(s_.segments.size());
    provenance_.resize(s_.segments.size(), Provenance::Forward);
    node_values_.resize(s_.nodes.size());
    try {
      seed();
      settle();
      glue_loops();
    } catch (const blowup_error& e) {
      ConsistencyReport r;
      r.status = SolveStatus::Blowup;
      r.segment = current_segment_;
      r.at = TimePoint{current_segment_, e.t};
      r.value_a = e.x;
      return SolveResult{r, std::nullopt};
    }
    if (failure_) return SolveResult{*failure_, std::nullopt};
    for (const Segment& seg : s_.segments) {
      if (trajectories_[seg.id].empty()) {
        ConsistencyReport r;
        r.status = SolveStatus::Unreached;
        r.segment = seg.id;
        return SolveResult{r, std::nullopt};
      }
    }
    Solution sol;
    sol.f = p_.f;
    sol.trajectories = std::move(trajectories_);
    sol.provenance = std::move(provenance_);
    return SolveResult{ConsistencyReport{}, std::move(sol)};
  }

 private:
  struct NodeValue {
    bool set = false;
    double x = 0.0;
  };

  void validate_problem() {
    if (!p_.f.valid()) throw solver_error("no field expression");
    if (p_.conditions.empty()) throw solver_error("no initial conditions");
    std::set<TimePoint> seen;
    for (const Condition& c : p_.conditions) {
      const Segment& seg = checked_segment(s_, c.point.segment);
      if (!seg.contains(c.point.t))
        throw solver_error("condition at t=" + std::to_string(c.point.t) +
                           " is not a point of segment " +
                           std::to_string(seg.id));
      if (!std::isfinite(c.x)) throw solver_error("non-finite condition value");
      if (!seen.insert(c.point).second)
        throw solver_error("duplicate condition at t=" +
                           std::to_string(c.point.t) + " on segment " +
                           std::to_string(c.point.segment));
    }
  }

  void seed() {
    std::vector<Condition> conds = p_.conditions;
    std::sort(conds.begin(), conds.end(),
              [](const Condition& a, const Condition& b) {
                return a.point < b.point;
              });
    for (const Condition& c : conds)
      conditions_by_segment_[c.point.segment].push_back(c);
    for (const auto& [seg_id, list] : conditions_by_segment_) {
      anchor(seg_id, list.front().point.t, list.front().x, Provenance::Seeded);
      if (failure_) return;
    }
  }

  // Builds the segment's trajectory from one (t, x) anchor, then verifies any
  // further conditions prescribed on the same segment against it.
  void anchor(int seg_id, double t, double x, Provenance prov) {
    if (!trajectories_[seg_id].empty() || failure_) return;
    current_segment_ = seg_id;
    trajectories_[seg_id] =
        anchored_trajectory(p_.f, s_.segments[seg_id], t, x, cfg_);
    provenance_[seg_id] = prov;
    queue_.push_back(seg_id);
    auto it = conditions_by_segment_.find(seg_id);
    if (it == conditions_by_segment_.end()) return;
    for (const Condition& c : it->second) {
      double have = trajectories_[seg_id].value_at(c.point.t);
      if (!within_tolerance(have, c.x, cfg_)) {
        ConsistencyReport r;
        r.status = SolveStatus::InconsistentInitialConditions;
        r.segment = seg_id;
        r.at = c.point;
        r.value_a = have;
        r.value_b = c.x;
        r.gap = std::abs(have - c.x);
        r.threshold = tolerance_threshold(have, c.x, cfg_);
        failure_ = r;
        return;
      }
    }
  }

  // A segment endpoint value arriving at a node: the first arrival fixes the
  // node's value and launches every still-unknown incident segment; later
  // arrivals must agree within tolerance.
  void deliver(int node_id, double x, int from_segment) {
    if (failure_) return;
    const NodeEvent& node = s_.nodes[node_id];
    NodeValue& nv = node_values_[node_id];
    if (nv.set) {
      if (!within_tolerance(nv.x, x, cfg_)) {
        ConsistencyReport r;
        r.status = node.kind == NodeKind::division
                       ? SolveStatus::InconsistentInitialConditions
                       : SolveStatus::StickingMismatch;
        r.node = node_id;
        r.at = TimePoint{from_segment, node.t};
        r.value_a = nv.x;
        r.value_b = x;
        r.gap = std::abs(nv.x - x);
        r.threshold = tolerance_threshold(nv.x, x, cfg_);
        failure_ = r;
      }
      return;
    }
    nv.set = true;
    nv.x = x;
    bool from_fan = node.kind == NodeKind::division &&
                    std::find(node.out_segments.begin(),
                              node.out_segments.end(),
                              from_segment) != node.out_segments.end();
    for (int seg : node.in_segments) {
      anchor(seg, node.t, x, Provenance::Retrodicted);
      if (failure_) return;
    }
    for (int seg : node.out_segments) {
      anchor(seg, node.t, x,
             from_fan ? Provenance::CopiedToSibling : Provenance::Forward);
      if (failure_) return;
    }
  }

  void settle() {
    while (!queue_.empty() && !failure_) {
      int seg_id = queue_.front();
      queue_.pop_front();
      const Segment& seg = s_.segments[seg_id];
      const Trajectory& traj = trajectories_[seg_id];
      if (seg.lo_node) deliver(*seg.lo_node, traj.xs.front(), seg_id);
      if (failure_) return;
      if (seg.hi_node) deliver(*seg.hi_node, traj.xs.back(), seg_id);
    }
  }

  void glue_loops() {
    if (failure_ || s_.identifications.empty()) return;
    std::set<int> verified;
    for (int pass = 0; pass < kMaxLoopPasses; ++pass) {
      bool changed = false;
      for (const Identification& ident : s_.identifications) {
        if (failure_) return;
        const Trajectory& from = trajectories_[ident.from_point.segment];
        const Trajectory& to = trajectories_[ident.to_point.segment];
        if (!from.empty() && !to.empty()) {
          if (verified.count(ident.id)) continue;
          double a = from.value_at(ident.from_point.t);
          double b = to.value_at(ident.to_point.t);
          if (!within_tolerance(a, b, cfg_)) {
            ConsistencyReport r;
            r.status = SolveStatus::LoopInconsistent;
            r.identification = ident.id;
            r.value_a = a;
            r.value_b = b;
            r.gap = std::abs(a - b);
            r.threshold = tolerance_threshold(a, b, cfg_);
            failure_ = r;
            return;
          }
          verified.insert(ident.id);
        } else if (!from.empty()) {
          anchor(ident.to_point.segment, ident.to_point.t,
                 from.value_at(ident.from_point.t), Provenance::Glued);
          settle();
          changed = true;
        } else if (!to.empty()) {
          anchor(ident.from_point.segment, ident.from_point.t,
                 to.value_at(ident.to_point.t), Provenance::Glued);
          settle();
          changed = true;
        }
      }
      if (!changed) break;
    }
  }

  const TemporalStructure& s_;
  const CauchyProblem& p_;
  SolverConfig cfg_;
  std::vector<Trajectory> trajectories_;
  std::vector<Provenance> provenance_;
  std::vector<NodeValue> node_values_;
  std::map<int, std::vector<Condition>> conditions_by_segment_;
  std::deque<int> queue_;
  std::optional<ConsistencyReport> failure_;
  int current_segment_ = -1;
};

}  // namespace detail

// Solves the generalized Cauchy problem on a branched timeline.  Values cross
// division nodes forward into every copy and backward into the past
// (retrodiction re-predicts sibling copies), cross sticking nodes
// symmetrically, and cross identifications once one side is known.  A second
// independent value meeting an established one anywhere is a consistency
// check; the first failed check decides the report.
inline SolveResult solve(const TemporalStructure& s, const CauchyProblem& p,
                         const SolverConfig& cfg = {}) {
  detail::SolveDriver driver(s, p, cfg);
  return driver.run();
}

// One full turn around a circle made by gluing t2 back to t1: integrates a
// period from (t_in, x_in) and demands the state return to its start.
struct CircleOutcome {
  ConsistencyReport report;
  Trajectory trajectory;  // one period from t_in; empty only on blow-up
};

inline CircleOutcome solve_circle(double t1, double t2, const Expr& f,
                                  double t_in, double x_in,
                                  const SolverConfig& cfg = {}) {
  detail::check_config(cfg);
  if (!(t1 < t2)) throw solver_error("need t1 < t2 to identify");
  CircleOutcome out;
  try {
    SampledPath path = integrate_segment(f, t_in, x_in, t_in + (t2 - t1), cfg);
    out.trajectory.segment = 0;
    out.trajectory.ts = std::move(path.ts);
    out.trajectory.xs = std::move(path.xs);
  } catch (const blowup_error& e) {
    out.report.status = SolveStatus::Blowup;
    out.report.segment = 0;
    out.report.at = TimePoint{0, e.t};
    out.report.value_a = e.x;
    return out;
  }
  double x_back = out.trajectory.xs.back();
  if (!within_tolerance(x_back, x_in, cfg)) {
    out.report.status = SolveStatus::LoopInconsistent;
    out.report.value_a = x_in;
    out.report.value_b = x_back;
    out.report.gap = std::abs(x_back - x_in);
    out.report.threshold = tolerance_threshold(x_back, x_in, cfg);
  }
  return out;
}

// Would this gluing be consistent with the given solution?  Compares the
// solution's values at the identification's two points.
struct LoopCheck {
  bool consistent = false;
  double value_from = 0.0;
  double value_to = 0.0;
  double gap = 0.0;
  double threshold = 0.0;
};

inline LoopCheck check_loop_consistency(const Solution& sol,
                                        const Identification& ident,
                                        const SolverConfig& cfg = {}) {
  LoopCheck c;
  c.value_from = sol.value(ident.from_point);
  c.value_to = sol.value(ident.to_point);
  c.gap = std::abs(c.value_from - c.value_to);
  c.threshold = tolerance_threshold(c.value_from, c.value_to, cfg);
  c.consistent = c.gap <= c.threshold;
  return c;
}

// Rewriting the past at one instant: the timeline divides there into the
// future that already happened (seeded with the solution's own value x1) and
// a future seeded with the replacement value x2.  Each future is solvable on
// its own; the joint two-point problem is well-posed only when nothing
// actually changed.
struct MultihistoryOutcome {
  TemporalStructure structure;  // the input timeline, divided at the instant
  int trunk_segment = -1;       // segment that was cut (keeps its id)
  int branch1 = -1;             // copy continuing the original history
  int branch2 = -1;             // copy carrying the rewritten history
  double x1 = 0.0;              // value the original history assigns there
  double x2 = 0.0;              // prescribed replacement value
  Solution branch1_solution;    // original solution restricted to copy 1's cone
  Solution branch2_solution;    // fresh forward run on copy 2
  ConsistencyReport joint;      // verdict on the generalized two-point problem
};

inline MultihistoryOutcome rewrite_history(const TemporalStructure& s,
                                           const Solution& sol, TimePoint t1,
                                           double x2,
                                           const SolverConfig& cfg = {}) {
  detail::check_config(cfg);
  const Segment& seg = detail::checked_segment(s, t1.segment);
  if (!seg.strictly_inside(t1.t))
    throw solver_error("rewrite instant must be interior to a segment");
  const Trajectory& orig = sol.at(t1.segment);

  MultihistoryOutcome out;
  out.structure = split_division(s, t1.segment, t1.t, 2);
  out.trunk_segment = t1.segment;
  out.branch1 = static_cast<int>(s.segments.size());
  out.branch2 = out.branch1 + 1;
  out.x1 = orig.value_at(t1.t);
  out.x2 = x2;

  // Copy 1 keeps the original history: its trajectory is the restriction of
  // the given solution, so the samples past t1 match the original bitwise.
  out.branch1_solution.f = sol.f;
  out.branch1_solution.trajectories.resize(out.structure.segments.size());
  out.branch1_solution.provenance.resize(out.structure.segments.size(),
                                         Provenance::Forward);
  Trajectory r;
  r.segment = out.branch1;
  r.ts.push_back(t1.t);
  r.xs.push_back(out.x1);
  for (std::size_t i = 0; i < orig.ts.size(); ++i) {
    if (orig.ts[i] > t1.t) {
      r.ts.push_back(orig.ts[i]);
      r.xs.push_back(orig.xs[i]);
    }
  }
  out.branch1_solution.trajectories[out.branch1] = std::move(r);
  out.branch1_solution.provenance[out.branch1] = Provenance::Seeded;
  // Downstream segments were inherited intact by copy 1 (ids unchanged), so
  // their original trajectories carry over.
  {
    std::deque<int> pending;
    const Segment& b1 = out.structure.segments[out.branch1];
    if (b1.hi_node) pending.push_back(*b1.hi_node);
    std::set<int> seen_nodes;
    while (!pending.empty()) {
      int node_id = pending.front();
      pending.pop_front();
      if (!seen_nodes.insert(node_id).second) continue;
      for (int next : out.structure.nodes[node_id].out_segments) {
        out.branch1_solution.trajectories[next] = sol.trajectories[next];
        out.branch1_solution.provenance[next] = sol.provenance[next];
        if (out.structure.segments[next].hi_node)
          pending.push_back(*out.structure.segments[next].hi_node);
      }
    }
  }

  // Copy 2 is the rewritten history, integrated fresh from (t1, x2).
  out.branch2_solution.f = sol.f;
  out.branch2_solution.trajectories.resize(out.structure.segments.size());
  out.branch2_solution.provenance.resize(out.structure.segments.size(),
                                         Provenance::Forward);
  const Segment& b2 = out.structure.segments[out.branch2];
  SampledPath fresh = integrate_segment(sol.f, b2.lo, x2, b2.hi, cfg);
  Trajectory rewritten;
  rewritten.segment = out.branch2;
  rewritten.ts = std::move(fresh.ts);
  rewritten.xs = std::move(fresh.xs);
  out.branch2_solution.trajectories[out.branch2] = std::move(rewritten);
  out.branch2_solution.provenance[out.branch2] = Provenance::Seeded;

  if (!within_tolerance(out.x1, out.x2, cfg)) {
    out.joint.status = SolveStatus::InconsistentInitialConditions;
    out.joint.node = static_cast<int>(s.nodes.size());
    out.joint.value_a = out.x1;
    out.joint.value_b = out.x2;
    out.joint.gap = std::abs(out.x1 - out.x2);
    out.joint.threshold = tolerance_threshold(out.x1, out.x2, cfg);
  }
  return out;
}

// Bifurcating paths in a split *state* space: the half-line [split_at, +inf)
// of x-values is doubled, and a trajectory crossing into it transversally may
// enter either copy.  Both continuations share every (t, x) sample; from
// t_bif onward they are distinct points because the copy differs.
struct StateContinuation {
  int copy = 0;  // which copy of the split half-line the path enters
  std::vector<double> ts;
  std::vector<double> xs;
};

struct BifurcationOutcome {
  double t_bif = 0.0;
  StateContinuation first;
  StateContinuation second;
};

inline BifurcationOutcome dual_continuations(const Expr& f, double x_in,
                                             double t_in, double split_at,
                                             const SolverConfig& cfg = {},
                                             double t_max = Horizon{}.t_max) {
  detail::check_config(cfg);
  if (!f.valid()) throw solver_error("no field expression");
  double f_split;
  if (!f.try_eval(split_at, f_split))
    throw solver_error("f is not evaluable at the split value");
  if (x_in == split_at && f_split == 0.0)
    throw solver_error("grazing contact: f vanishes at the split value");
  if (x_in >= split_at)
    throw solver_error("initial state already inside the split region");
  if (!(t_in < t_max)) throw solver_error("empty forward window");

  SampledPath path = integrate_segment(f, t_in, x_in, t_max, cfg);
  std::size_t cross = path.xs.size();
  for (std::size_t i = 1; i < path.xs.size(); ++i) {
    if (path.xs[i] >= split_at) {
      cross = i;
      break;
    }
  }
  if (cross == path.xs.size())
    throw solver_error("trajectory never reaches the split value by t=" +
                       std::to_string(t_max));
  if (f_split == 0.0)
    throw solver_error("grazing contact: f vanishes at the split value");

  BifurcationOutcome out;
  if (path.xs[cross] == split_at) {
    out.t_bif = path.ts[cross];
  } else {
    double w = (split_at - path.xs[cross - 1]) /
               (path.xs[cross] - path.xs[cross - 1]);
    double t_bif =
        path.ts[cross - 1] + w * (path.ts[cross] - path.ts[cross - 1]);
    if (t_bif > path.ts[cross - 1] && t_bif < path.ts[cross]) {
      path.ts.insert(path.ts.begin() + static_cast<long>(cross), t_bif);
      path.xs.insert(path.xs.begin() + static_cast<long>(cross), split_at);
    } else {
      // interpolation collapsed onto a grid point; snap to it
      t_bif = t_bif <= path.ts[cross - 1] ? path.ts[cross - 1] : path.ts[cross];
    }
    out.t_bif = t_bif;
  }
  out.first.copy = 1;
  out.second.copy = 2;
  out.first.ts = path.ts;
  out.first.xs = path.xs;
  out.second.ts = std::move(path.ts);
  out.second.xs = std::move(path.xs);
  return out;
}

}  // namespace branchtime

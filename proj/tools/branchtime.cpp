// Command-line front end: build and validate scenario files, solve Cauchy
// problems on their structures, export DOT graphs, and run order/separation
// diagnostics.  Exit codes: 0 valid/well-posed, 1 input error, 2 consistency
// failure, 3 blow-up.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "branchtime/expr.hpp"
#include "branchtime/format.hpp"
#include "branchtime/graph.hpp"
#include "branchtime/order.hpp"
#include "branchtime/scenario.hpp"
#include "branchtime/solver.hpp"
#include "branchtime/structure.hpp"

namespace {

using namespace branchtime;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kConsistencyFailure = 2;
constexpr int kBlowup = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_number(std::string_view text, const std::string& what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::runtime_error(what + " is not a number: \"" +
                             std::string(text) + "\"");
  return value;
}

std::vector<int> parse_path(std::string_view text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw std::runtime_error("branch path must look like [] or [1,2], got \"" +
                             std::string(text) + "\"");
  std::vector<int> path;
  std::string_view inner = text.substr(1, text.size() - 2);
  while (!inner.empty()) {
    const std::size_t comma = inner.find(',');
    const std::string_view item = inner.substr(0, comma);
    int branch = 0;
    auto res =
        std::from_chars(item.data(), item.data() + item.size(), branch);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
      throw std::runtime_error("branch path entry is not an integer: \"" +
                               std::string(item) + "\"");
    path.push_back(branch);
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return path;
}

// `path@t=value` with `[]` naming the root segment, e.g. "[1,2]@0.5=3".
Condition parse_initial_condition(const TemporalStructure& s,
                                  const std::string& text) {
  const std::size_t at = text.find('@');
  const std::size_t eq = text.find('=', at == std::string::npos ? 0 : at);
  if (at == std::string::npos || eq == std::string::npos)
    throw std::runtime_error(
        "initial condition must look like path@t=value, got \"" + text + "\"");
  const std::vector<int> path = parse_path(std::string_view(text).substr(0, at));
  const double t = parse_number(
      std::string_view(text).substr(at + 1, eq - at - 1), "coordinate");
  const double value =
      parse_number(std::string_view(text).substr(eq + 1), "value");
  return Condition{locate(s, path, t), value};
}

std::optional<Horizon> parse_horizon(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw std::runtime_error("horizon must look like lo,hi, got \"" + text +
                             "\"");
  Horizon h;
  h.t_min = parse_number(std::string_view(text).substr(0, comma), "horizon lo");
  h.t_max = parse_number(std::string_view(text).substr(comma + 1), "horizon hi");
  return h;
}

// Returns the stream the payload goes to: the named file, or stdout.
std::ostream& output_stream(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write output file: " + path);
  return file;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

TemporalStructure load_structure(const std::string& scenario_path,
                                 const std::string& horizon_text) {
  return read_scenario(read_file(scenario_path), parse_horizon(horizon_text));
}

int cmd_build(const std::string& scenario_path,
              const std::string& horizon_text) {
  TemporalStructure s = load_structure(scenario_path, horizon_text);
  ValidationReport v = validate(s);
  std::cout << "segments: " << v.segment_count << '\n'
            << "nodes: " << v.node_count << '\n'
            << "identifications: " << v.identification_count << '\n'
            << "chronology-violating: " << bool_text(v.chronology_violating)
            << '\n'
            << "valid: " << bool_text(v.ok()) << '\n';
  for (const std::string& failure : v.failures)
    std::cout << "failure: " << failure << '\n';
  return v.ok() ? kOk : kInputError;
}

int cmd_solve(const std::string& scenario_path, const std::string& horizon_text,
              const std::string& f_text, const std::vector<std::string>& ics,
              const SolverConfig& cfg, const std::string& out_path,
              const std::string& report_path) {
  TemporalStructure s = load_structure(scenario_path, horizon_text);
  ValidationReport v = validate(s);
  if (!v.ok()) {
    for (const std::string& failure : v.failures)
      std::cerr << "error: " << failure << '\n';
    return kInputError;
  }

  // Resolve everything before computing anything.
  CauchyProblem problem;
  problem.f = parse(f_text);
  for (const std::string& ic : ics)
    problem.conditions.push_back(parse_initial_condition(s, ic));

  SolveResult result = solve(s, problem, cfg);

  if (result.well_posed()) {
    std::ofstream file;
    write_trajectory_csv(output_stream(out_path, file), s, *result.solution);
  }
  if (!report_path.empty()) {
    std::ofstream file;
    write_report(output_stream(report_path, file), result.report);
  } else if (!result.well_posed()) {
    write_report(std::cout, result.report);
  }

  switch (result.report.status) {
    case SolveStatus::WellPosed:
      return kOk;
    case SolveStatus::Blowup:
      return kBlowup;
    default:
      return kConsistencyFailure;
  }
}

int cmd_graph(const std::string& scenario_path, const std::string& horizon_text,
              const std::string& dot_path) {
  TemporalStructure s = load_structure(scenario_path, horizon_text);
  std::ofstream file;
  output_stream(dot_path, file) << to_dot(s, format_double);
  return kOk;
}

int cmd_check(const std::string& scenario_path, const std::string& horizon_text,
              bool apply_mccabe) {
  TemporalStructure s = load_structure(scenario_path, horizon_text);
  if (apply_mccabe) s = mccabe_quotient(s);

  const ChronRelationReport rel = chron_relation_report(s);
  const auto pairs = hausdorff_pairs(s);
  std::cout << "is_preorder: " << bool_text(rel.is_preorder) << '\n'
            << "is_partial_order: " << bool_text(rel.is_partial_order) << '\n'
            << "chronology-violating: " << bool_text(rel.chronology_violating)
            << '\n';
  if (rel.witness_pair) {
    const auto& [a, b] = *rel.witness_pair;
    std::cout << "witness: " << format_path(s.segments[a.segment]) << '@'
              << format_double(a.t) << " ~ "
              << format_path(s.segments[b.segment]) << '@'
              << format_double(b.t) << '\n';
  }
  std::cout << "hausdorff_pairs: " << pairs.size() << '\n'
            << "is_hausdorff: " << bool_text(pairs.empty()) << '\n';
  if (rel.chronology_violating)
    std::cout << "quotient_hausdorff: chronology-violating\n";
  else
    std::cout << "quotient_hausdorff: "
              << bool_text(is_hausdorff(mccabe_quotient(s))) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branched timelines and the Cauchy problems that live on them"};
  app.require_subcommand(1);

  std::string build_path, build_horizon;
  CLI::App* build = app.add_subcommand(
      "build", "parse a scenario, build its structure, and validate it");
  build->add_option("scenario", build_path, "scenario JSON file")->required();
  build->add_option("--horizon", build_horizon, "override the horizon: lo,hi");

  std::string solve_path, solve_horizon, f_text, out_path, report_path;
  std::vector<std::string> ic_texts;
  SolverConfig cfg;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "solve x' = f(x) with the given initial conditions");
  solve_cmd->add_option("scenario", solve_path, "scenario JSON file")
      ->required();
  solve_cmd->add_option("--f", f_text, "right-hand side f(x)")->required();
  solve_cmd
      ->add_option("--ic", ic_texts,
                   "initial condition path@t=value ([] is the root)")
      ->required()
      ->type_size(1);
  solve_cmd->add_option("--step", cfg.step, "integration step");
  solve_cmd->add_option("--tol-abs", cfg.tol_abs, "absolute tolerance");
  solve_cmd->add_option("--tol-rel", cfg.tol_rel, "relative tolerance");
  solve_cmd->add_option("--horizon", solve_horizon,
                        "override the horizon: lo,hi");
  solve_cmd->add_option("--out", out_path, "trajectory CSV path (else stdout)");
  solve_cmd->add_option("--report", report_path,
                        "consistency report path (else stdout on failure)");

  std::string graph_path, graph_horizon, dot_path;
  CLI::App* graph_cmd =
      app.add_subcommand("graph", "export the structure graph as DOT");
  graph_cmd->add_option("scenario", graph_path, "scenario JSON file")
      ->required();
  graph_cmd->add_option("--dot", dot_path, "DOT output path (else stdout)");
  graph_cmd->add_option("--horizon", graph_horizon,
                        "override the horizon: lo,hi");

  std::string check_path, check_horizon;
  bool apply_mccabe = false;
  CLI::App* check_cmd = app.add_subcommand(
      "check", "order and separation diagnostics for a scenario");
  check_cmd->add_option("scenario", check_path, "scenario JSON file")
      ->required();
  check_cmd->add_flag("--mccabe", apply_mccabe,
                      "apply the Hausdorff-restoring quotient first");
  check_cmd->add_option("--horizon", check_horizon,
                        "override the horizon: lo,hi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*build) return cmd_build(build_path, build_horizon);
    if (*solve_cmd)
      return cmd_solve(solve_path, solve_horizon, f_text, ic_texts, cfg,
                       out_path, report_path);
    if (*graph_cmd) return cmd_graph(graph_path, graph_horizon, dot_path);
    if (*check_cmd) return cmd_check(check_path, check_horizon, apply_mccabe);
  } catch (const chronology_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConsistencyFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

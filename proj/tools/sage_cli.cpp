// sage: collision-free bank mapping for parallel interleavers.
//
//   sage solve    <problem.json> [--solver sage|baseline|oracle] [--strict-objective]
//                                [--max-nodes K] [--seed N] [--trace] [--pretty]
//   sage verify   <problem.json> <mapping.json>
//   sage compare  <problem.json> [--seed N | --seed-range A:B] [--pretty]
//   sage oracle   <problem.json> [--free-first-column]
//
// Exit codes: 0 solved with the objective met (verify: valid), 1 bad input,
// 2 solved with the objective relaxed, 3 infeasible or budget exhausted,
// 4 verify found collisions.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sage/io.hpp"
#include "sage/sage.hpp"

namespace {

using sage::io::json;

enum Exit : int { kOk = 0, kBadInput = 1, kRelaxed = 2, kUnsolved = 3, kInvalid = 4 };

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sage::Error(sage::ErrorCode::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sage::Error(sage::ErrorCode::ParseError, path + ": " + e.what());
  }
}

void print_grid(const std::string& title, const std::vector<std::string>& rows) {
  std::cerr << title << '\n';
  for (const auto& row : rows) std::cerr << "  " << row << '\n';
}

void print_trace(const sage::SolveOutcome& outcome) {
  using Kind = sage::TraceEvent::Kind;
  auto col_name = [](sage::ColumnRef c) { return std::string(sage::to_string(c.side)) + "[" + std::to_string(c.index) + "]"; };
  auto tuple_text = [](const sage::ColumnAssignment& t) {
    std::string s;
    for (const auto& a : t) s += " " + std::to_string(a.datum) + "->" + sage::bank_label(a.bank);
    return s;
  };
  for (const auto& e : outcome.trace) {
    std::cerr << std::string(e.depth * 2, ' ');
    switch (e.kind) {
      case Kind::Select: {
        std::cerr << "select " << col_name(e.column);
        for (const auto& cell : e.lists) {
          std::cerr << "  " << cell.datum << ":{";
          for (std::size_t i = 0; i < cell.options.size(); ++i) {
            std::cerr << (i ? "," : "") << sage::bank_label(cell.options[i]);
          }
          std::cerr << "}";
        }
        break;
      }
      case Kind::Assign: std::cerr << "assign " << col_name(e.column) << tuple_text(e.assignment); break;
      case Kind::Backtrack: std::cerr << "undo   " << col_name(e.column) << tuple_text(e.assignment); break;
      case Kind::Relax: std::cerr << "objective unreachable, retrying without filtering"; break;
    }
    std::cerr << '\n';
  }
}

void print_report(const sage::io::SolveReport& report, const sage::SchedulePair& schedules) {
  std::cerr << "solver: " << report.solver << "  status: " << report.status
            << "  objective(" << report.problem.objective.name() << ") met: " << (report.objective_met ? "yes" : "no")
            << '\n';
  print_grid("M_Nat", sage::io::render_schedule(schedules.natural));
  print_grid("M_Int", sage::io::render_schedule(schedules.interleaved));
  if (report.banks.empty()) return;
  print_grid("MAP_Nat", report.natural_matrix);
  print_grid("MAP_Int", report.interleaved_matrix);
  for (std::size_t b = 0; b < report.banks.size(); ++b) {
    std::cerr << "Bank " << sage::bank_label(sage::bank(b)) << " = {";
    for (std::size_t i = 0; i < report.banks[b].size(); ++i) std::cerr << (i ? ", " : "") << report.banks[b][i];
    std::cerr << "}\n";
  }
}

int exit_for(const sage::io::SolveReport& report) {
  if (report.status != "solved") return kUnsolved;
  return report.objective_met ? kOk : kRelaxed;
}

struct SolveFlags {
  std::string solver = "sage";
  bool strict = false;
  std::optional<std::uint64_t> max_nodes;
  std::uint64_t seed = 1;
  bool trace = false;
  bool pretty = false;
};

sage::io::SolveReport run_sage(const sage::io::ProblemFile& problem, const SolveFlags& flags) {
  sage::SolveOptions options;
  options.relax_on_objective_failure = !flags.strict;
  options.max_nodes = flags.max_nodes;
  options.trace = flags.trace;
  const sage::SolveOutcome outcome = sage::memmap_solve(problem.spec, problem.objective, options);
  if (flags.trace) print_trace(outcome);

  sage::io::SolveReport report{problem};
  report.solver = "sage";
  report.status = std::string(sage::to_string(outcome.status));
  report.relaxed = outcome.relaxed;
  report.stats = outcome.stats;
  if (outcome.mapping) sage::io::attach_mapping(report, *outcome.mapping, sage::build_schedules(problem.spec));
  return report;
}

sage::io::SolveReport run_baseline(const sage::io::ProblemFile& problem, std::uint64_t seed) {
  const sage::SchedulePair schedules = sage::build_schedules(problem.spec);
  sage::io::SolveReport report{problem};
  report.solver = "baseline";
  report.seed = seed;
  try {
    const sage::BaselineOutcome outcome = sage::baseline_solve(schedules, seed);
    report.status = "solved";
    sage::io::attach_mapping(report, outcome.mapping, schedules);
  } catch (const sage::Error& e) {
    if (e.code() != sage::ErrorCode::RepairBudgetExhausted) throw;
    report.status = "budget-exhausted";
  }
  return report;
}

sage::io::SolveReport run_oracle(const sage::io::ProblemFile& problem) {
  const sage::SchedulePair schedules = sage::build_schedules(problem.spec);
  const auto solutions = sage::brute_force_solve(schedules, problem.objective, true);
  sage::io::SolveReport report{problem};
  report.solver = "oracle";
  report.status = solutions.empty() ? "infeasible" : "solved";
  if (!solutions.empty()) sage::io::attach_mapping(report, solutions.front(), schedules);
  return report;
}

int cmd_solve(const std::string& path, const SolveFlags& flags) {
  const auto problem = sage::io::parse_problem(read_json(path));
  const sage::io::SolveReport report = flags.solver == "sage"       ? run_sage(problem, flags)
                                      : flags.solver == "baseline" ? run_baseline(problem, flags.seed)
                                                                   : run_oracle(problem);
  std::cout << sage::io::report_to_json(report).dump(2) << '\n';
  if (flags.pretty) print_report(report, sage::build_schedules(problem.spec));
  return exit_for(report);
}

int cmd_verify(const std::string& problem_path, const std::string& mapping_path) {
  const auto problem = sage::io::parse_problem(read_json(problem_path));
  const sage::SchedulePair schedules = sage::build_schedules(problem.spec);
  const sage::BankMapping mapping = sage::io::parse_mapping(read_json(mapping_path), problem.spec.length());
  if (mapping.bank_count() != problem.spec.parallelism()) {
    throw sage::Error(sage::ErrorCode::ParseError, "mapping lists " + std::to_string(mapping.bank_count()) +
                                                       " banks, problem needs " +
                                                       std::to_string(problem.spec.parallelism()));
  }
  const sage::NetworkObjective objectives[] = {sage::NetworkObjective::crossbar(),
                                               sage::NetworkObjective::barrel_shifter()};
  const sage::VerificationReport report = sage::verify_mapping(mapping, schedules, objectives);

  json conflicts = json::array();
  for (const auto& c : report.conflicts) {
    conflicts.push_back({{"order", sage::to_string(c.order)},
                         {"cycle", c.cycle},
                         {"bank", sage::bank_index(c.bank)},
                         {"data", {c.first, c.second}}});
  }
  json met = json::object();
  for (const auto& [obj, ok] : report.objective_met) met[std::string(obj.name())] = ok;
  json out{{"valid", report.valid}, {"conflicts", conflicts}, {"banks", report.bank_contents}, {"objective_met", met}};
  std::cout << out.dump(2) << '\n';
  return report.valid ? kOk : kInvalid;
}

int cmd_compare(const std::string& path, std::uint64_t seed, const std::string& seed_range, bool pretty) {
  const auto problem = sage::io::parse_problem(read_json(path));
  const sage::SchedulePair schedules = sage::build_schedules(problem.spec);
  std::uint64_t first = seed;
  std::uint64_t last = seed;
  if (!seed_range.empty()) {
    const auto colon = seed_range.find(':');
    if (colon == std::string::npos) throw sage::Error(sage::ErrorCode::ParseError, "--seed-range expects A:B");
    try {
      first = std::stoull(seed_range.substr(0, colon));
      last = std::stoull(seed_range.substr(colon + 1));
    } catch (const std::exception&) {
      throw sage::Error(sage::ErrorCode::ParseError, "--seed-range expects A:B");
    }
    if (last < first) throw sage::Error(sage::ErrorCode::ParseError, "--seed-range is empty");
  }

  SolveFlags flags;
  const auto ours = run_sage(problem, flags);
  auto valid = [&](const sage::io::SolveReport& r) {
    if (r.banks.empty()) return false;
    const auto mapping = sage::BankMapping::from_bank_lists(problem.spec.length(), r.banks);
    return sage::verify_mapping(mapping, schedules).valid;
  };

  json baselines = json::array();
  bool all_valid = valid(ours);
  std::size_t baseline_met = 0;
  for (std::uint64_t s = first; s <= last; ++s) {
    const auto theirs = run_baseline(problem, s);
    const bool ok = valid(theirs);
    all_valid = all_valid && ok;
    baseline_met += theirs.objective_met ? 1 : 0;
    json entry = sage::io::report_to_json(theirs);
    entry["valid"] = ok;
    baselines.push_back(std::move(entry));
    if (pretty) print_report(theirs, schedules);
  }
  json sage_json = sage::io::report_to_json(ours);
  sage_json["valid"] = valid(ours);
  json out{{"sage", sage_json},
           {"baseline", baselines},
           {"summary",
            {{"sage_objective_met", ours.objective_met},
             {"baseline_runs", last - first + 1},
             {"baseline_objective_met", baseline_met},
             {"all_valid", all_valid}}}};
  std::cout << out.dump(2) << '\n';
  if (pretty) print_report(ours, schedules);
  return all_valid ? kOk : kUnsolved;
}

int cmd_oracle(const std::string& path, bool free_first_column) {
  const auto problem = sage::io::parse_problem(read_json(path));
  const auto solutions = sage::brute_force_solve(sage::build_schedules(problem.spec), problem.objective,
                                                 !free_first_column);
  json entry{{"solution_count", solutions.size()},
             {"sample_solution", solutions.empty() ? json(nullptr) : sage::io::mapping_to_json(solutions.front())}};
  json out{{sage::io::instance_key(problem.spec, problem.objective, !free_first_column), entry}};
  std::cout << out.dump(2) << '\n';
  return solutions.empty() ? kUnsolved : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-free memory bank mapping for parallel interleavers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sage::io::kToolVersion);

  std::string problem_path;
  std::string mapping_path;
  SolveFlags flags;
  std::uint64_t max_nodes = 0;

  auto* solve = app.add_subcommand("solve", "Compute a bank mapping and its network controls");
  solve->add_option("problem", problem_path, "Problem file (JSON)")->required();
  solve->add_option("--solver", flags.solver, "sage | baseline | oracle")
      ->check(CLI::IsMember({"sage", "baseline", "oracle"}));
  solve->add_flag("--strict-objective", flags.strict, "Fail instead of relaxing an unreachable objective");
  auto* max_nodes_opt = solve->add_option("--max-nodes", max_nodes, "Search budget in committed columns");
  solve->add_option("--seed", flags.seed, "Seed for the baseline repair");
  solve->add_flag("--trace", flags.trace, "Print column selections and assignments to stderr");
  solve->add_flag("--pretty", flags.pretty, "Print the matrices to stderr");

  auto* verify = app.add_subcommand("verify", "Check a mapping for access collisions");
  verify->add_option("problem", problem_path, "Problem file (JSON)")->required();
  verify->add_option("mapping", mapping_path, "Mapping file (JSON)")->required();

  std::uint64_t compare_seed = 1;
  std::string seed_range;
  bool compare_pretty = false;
  auto* compare = app.add_subcommand("compare", "Run the search solver and the baseline side by side");
  compare->add_option("problem", problem_path, "Problem file (JSON)")->required();
  auto* seed_opt = compare->add_option("--seed", compare_seed, "Baseline seed");
  compare->add_option("--seed-range", seed_range, "Baseline seeds A:B (inclusive)")->excludes(seed_opt);
  compare->add_flag("--pretty", compare_pretty, "Print the matrices to stderr");

  bool free_first = false;
  auto* oracle = app.add_subcommand("oracle", "Enumerate all mappings of a small block (fixture entry)");
  oracle->add_option("problem", problem_path, "Problem file (JSON)")->required();
  oracle->add_flag("--free-first-column", free_first, "Do not pin natural column 0 to the identity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  try {
    if (*max_nodes_opt) flags.max_nodes = max_nodes;
    if (*solve) return cmd_solve(problem_path, flags);
    if (*verify) return cmd_verify(problem_path, mapping_path);
    if (*compare) return cmd_compare(problem_path, compare_seed, seed_range, compare_pretty);
    if (*oracle) return cmd_oracle(problem_path, free_first);
  } catch (const sage::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

#pragma once

// JSON problem / mapping / report files and text rendering of the matrices.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sage/errors.hpp"
#include "sage/mapping.hpp"
#include "sage/network.hpp"
#include "sage/schedule.hpp"
#include "sage/solver.hpp"

namespace sage::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

struct ProblemFile {
  ProblemSpec spec;
  NetworkObjective objective = NetworkObjective::crossbar();

  bool operator==(const ProblemFile&) const = default;
};

inline std::string_view fill_name(FillOrder order) {
  return order == FillOrder::RowMajorBlocks ? "row-major-blocks" : "column-major-sequence";
}

inline FillOrder parse_fill(const json& value, const std::string& field) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "row-major-blocks") return FillOrder::RowMajorBlocks;
    if (s == "column-major-sequence") return FillOrder::ColumnMajorSequence;
  }
  throw Error(ErrorCode::ParseError, "field '" + field + "' must be \"row-major-blocks\" or \"column-major-sequence\"");
}

inline std::vector<std::size_t> parse_index_array(const json& value, const std::string& field) {
  if (!value.is_array()) throw Error(ErrorCode::ParseError, "field '" + field + "' must be an array of integers");
  std::vector<std::size_t> out;
  out.reserve(value.size());
  for (const json& item : value) {
    if (!item.is_number_integer() || item.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::ParseError, "field '" + field + "' must hold non-negative integers");
    }
    out.push_back(item.get<std::size_t>());
  }
  return out;
}

/// {"permutation": [...], "parallelism": k, "objective": "...", "conventions": {...}};
/// unknown keys are rejected.
inline ProblemFile parse_problem(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "problem file must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "permutation" && key != "parallelism" && key != "objective" && key != "conventions") {
      throw Error(ErrorCode::ParseError, "unknown field '" + key + "'");
    }
  }
  if (!doc.contains("permutation")) throw Error(ErrorCode::ParseError, "missing field 'permutation'");
  if (!doc.contains("parallelism")) throw Error(ErrorCode::ParseError, "missing field 'parallelism'");
  const json& par = doc.at("parallelism");
  if (!par.is_number_integer() || par.get<std::int64_t>() <= 0) {
    throw Error(ErrorCode::ParseError, "field 'parallelism' must be a positive integer");
  }

  LayoutConventions conventions;
  if (doc.contains("conventions")) {
    const json& conv = doc.at("conventions");
    if (!conv.is_object()) throw Error(ErrorCode::ParseError, "field 'conventions' must be an object");
    for (const auto& [key, value] : conv.items()) {
      if (key == "natural") {
        conventions.natural_fill = parse_fill(value, "conventions.natural");
      } else if (key == "interleaved") {
        conventions.interleaved_fill = parse_fill(value, "conventions.interleaved");
      } else {
        throw Error(ErrorCode::ParseError, "unknown field 'conventions." + key + "'");
      }
    }
  }

  NetworkObjective objective = NetworkObjective::crossbar();
  if (doc.contains("objective")) {
    const json& obj = doc.at("objective");
    const auto parsed = obj.is_string() ? parse_objective(obj.get<std::string>()) : std::nullopt;
    if (!parsed) throw Error(ErrorCode::ParseError, "field 'objective' must be \"crossbar\" or \"barrel-shifter\"");
    objective = *parsed;
  }

  Permutation permutation = Permutation::from_entries(parse_index_array(doc.at("permutation"), "permutation"));
  return ProblemFile{ProblemSpec::make(std::move(permutation), par.get<std::size_t>(), conventions), objective};
}

inline json problem_to_json(const ProblemFile& problem) {
  const auto entries = problem.spec.permutation().entries();
  return json{
      {"permutation", std::vector<std::size_t>(entries.begin(), entries.end())},
      {"parallelism", problem.spec.parallelism()},
      {"objective", std::string(problem.objective.name())},
      {"conventions",
       {{"natural", fill_name(problem.spec.conventions().natural_fill)},
        {"interleaved", fill_name(problem.spec.conventions().interleaved_fill)}}},
  };
}

/// {"banks": [[data of bank 0], [data of bank 1], ...]}. Other keys are
/// ignored so a solve report doubles as a mapping file.
inline BankMapping parse_mapping(const json& doc, std::size_t length) {
  if (!doc.is_object() || !doc.contains("banks") || !doc.at("banks").is_array()) {
    throw Error(ErrorCode::ParseError, "mapping file needs a 'banks' array");
  }
  std::vector<std::vector<std::size_t>> lists;
  for (std::size_t b = 0; b < doc.at("banks").size(); ++b) {
    lists.push_back(parse_index_array(doc.at("banks")[b], "banks[" + std::to_string(b) + "]"));
  }
  return BankMapping::from_bank_lists(length, lists);
}

inline json mapping_to_json(const BankMapping& mapping) { return json{{"banks", mapping.contents()}}; }

// ---------------------------------------------------------------------------
// Rendering

inline std::vector<std::string> render_schedule(const AccessSchedule& schedule) {
  std::vector<std::string> out;
  for (std::size_t row = 0; row < schedule.rows(); ++row) {
    std::string line;
    for (std::size_t col = 0; col < schedule.cols(); ++col) {
      if (col) line += ' ';
      line += std::to_string(schedule.at(row, col));
    }
    out.push_back(std::move(line));
  }
  return out;
}

/// Bank letters of a mapping laid out over `schedule`.
inline std::vector<std::string> render_banks(const BankMapping& mapping, const AccessSchedule& schedule) {
  std::vector<std::string> out;
  for (std::size_t row = 0; row < schedule.rows(); ++row) {
    std::string line;
    for (std::size_t col = 0; col < schedule.cols(); ++col) {
      if (col) line += ' ';
      line += bank_label(mapping[schedule.at(row, col)]);
    }
    out.push_back(std::move(line));
  }
  return out;
}

/// One mapping matrix of a partial state; empty cells print as '-'.
inline std::vector<std::string> render_state(const MappingState& state, MatrixSide side) {
  std::vector<std::string> out;
  for (std::size_t row = 0; row < state.bank_count(); ++row) {
    std::string line;
    for (std::size_t col = 0; col < state.cycles(); ++col) {
      if (col) line += ' ';
      const auto b = state.cell(side, row, col);
      line += b ? bank_label(*b) : "-";
    }
    out.push_back(std::move(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Control schedule

inline json controls_to_json(const ControlSchedule& controls) {
  json out = json::object();
  for (AccessOrder order : {AccessOrder::Natural, AccessOrder::Interleaved}) {
    const OrderControls& ctl = controls[order];
    json words = json::array();
    if (ctl.kind == ObjectiveKind::BarrelShifter) {
      for (std::size_t r : ctl.rotations) words.push_back(r);
    } else {
      for (const ColumnPattern& p : ctl.routes) {
        json w = json::array();
        for (Bank b : p) w.push_back(bank_index(b));
        words.push_back(std::move(w));
      }
    }
    json reference = json::array();
    for (Bank b : ctl.reference) reference.push_back(bank_index(b));
    out[std::string(to_string(order))] = json{
        {"network", ctl.kind == ObjectiveKind::BarrelShifter ? "barrel-shifter" : "crossbar"},
        {"reference", std::move(reference)},
        {"words", std::move(words)},
        {"distinct_word_count", ctl.distinct_word_count},
    };
  }
  return out;
}

inline ColumnPattern pattern_from_json(const json& value) {
  ColumnPattern out;
  for (const json& b : value) out.push_back(bank(b.get<std::size_t>()));
  return out;
}

inline ControlSchedule controls_from_json(const json& doc) {
  ControlSchedule out;
  for (AccessOrder order : {AccessOrder::Natural, AccessOrder::Interleaved}) {
    const json& node = doc.at(std::string(to_string(order)));
    OrderControls& ctl = out[order];
    ctl.kind = node.at("network").get<std::string>() == "barrel-shifter" ? ObjectiveKind::BarrelShifter
                                                                          : ObjectiveKind::Crossbar;
    ctl.reference = pattern_from_json(node.at("reference"));
    for (const json& w : node.at("words")) {
      if (ctl.kind == ObjectiveKind::BarrelShifter) {
        ctl.rotations.push_back(w.get<std::size_t>());
      } else {
        ctl.routes.push_back(pattern_from_json(w));
      }
    }
    ctl.distinct_word_count = node.at("distinct_word_count").get<std::size_t>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solve report

struct SolveReport {
  explicit SolveReport(ProblemFile p) : problem(std::move(p)) {}

  ProblemFile problem;
  std::string solver = "sage";  // sage | baseline | oracle
  std::string status = "solved";
  bool objective_met = false;
  bool relaxed = false;
  std::vector<std::vector<std::size_t>> banks;  // empty unless solved
  std::vector<std::string> natural_matrix;
  std::vector<std::string> interleaved_matrix;
  std::optional<ControlSchedule> controls;
  SolveStats stats;
  std::optional<std::uint64_t> seed;
  std::string version = kToolVersion;

  bool operator==(const SolveReport&) const = default;
};

/// Fills the mapping-dependent fields of `report`: banks, rendered matrices,
/// objective flag and, when the objective allows it, the control schedule.
inline void attach_mapping(SolveReport& report, const BankMapping& mapping, const SchedulePair& schedules) {
  report.banks = mapping.contents();
  report.natural_matrix = render_banks(mapping, schedules.natural);
  report.interleaved_matrix = render_banks(mapping, schedules.interleaved);
  report.objective_met = objective_compatible(mapping, schedules, report.problem.objective);
  report.controls.reset();
  if (report.objective_met) report.controls = derive_controls(mapping, schedules, report.problem.objective);
}

inline json report_to_json(const SolveReport& r) {
  json out{
      {"tool", "sage"},
      {"version", r.version},
      {"solver", r.solver},
      {"problem", problem_to_json(r.problem)},
      {"status", r.status},
      {"objective_met", r.objective_met},
      {"relaxed", r.relaxed},
      {"banks", r.banks},
      {"matrices", {{"natural", r.natural_matrix}, {"interleaved", r.interleaved_matrix}}},
      {"controls", r.controls ? controls_to_json(*r.controls) : json(nullptr)},
      {"stats", {{"nodes", r.stats.nodes}, {"backtracks", r.stats.backtracks}, {"max_depth", r.stats.max_depth}}},
  };
  if (r.seed) out["seed"] = *r.seed;
  return out;
}

inline SolveReport report_from_json(const json& doc) {
  SolveReport r{parse_problem(doc.at("problem"))};
  r.version = doc.at("version").get<std::string>();
  r.solver = doc.at("solver").get<std::string>();
  r.status = doc.at("status").get<std::string>();
  r.objective_met = doc.at("objective_met").get<bool>();
  r.relaxed = doc.at("relaxed").get<bool>();
  r.banks = doc.at("banks").get<std::vector<std::vector<std::size_t>>>();
  r.natural_matrix = doc.at("matrices").at("natural").get<std::vector<std::string>>();
  r.interleaved_matrix = doc.at("matrices").at("interleaved").get<std::vector<std::string>>();
  if (!doc.at("controls").is_null()) r.controls = controls_from_json(doc.at("controls"));
  const json& stats = doc.at("stats");
  r.stats.nodes = stats.at("nodes").get<std::uint64_t>();
  r.stats.backtracks = stats.at("backtracks").get<std::uint64_t>();
  r.stats.max_depth = stats.at("max_depth").get<std::size_t>();
  if (doc.contains("seed")) r.seed = doc.at("seed").get<std::uint64_t>();
  return r;
}

// ---------------------------------------------------------------------------
// Oracle fixtures

/// Stable 64-bit FNV-1a key of an oracle query, as 16 hex digits.
inline std::string instance_key(const ProblemSpec& spec, NetworkObjective objective, bool fix_first_column) {
  std::string canonical = std::to_string(spec.length()) + ";" + std::to_string(spec.parallelism()) + ";";
  for (std::size_t v : spec.permutation().entries()) canonical += std::to_string(v) + ",";
  canonical += ";";
  canonical += fill_name(spec.conventions().natural_fill);
  canonical += ";";
  canonical += fill_name(spec.conventions().interleaved_fill);
  canonical += ";";
  canonical += objective.name();
  canonical += fix_first_column ? ";fixed" : ";free";
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace sage::io

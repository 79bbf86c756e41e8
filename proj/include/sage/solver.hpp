#pragma once

// Recursive mapping search over the paired MAP_Nat / MAP_Int matrices.
//
// The search seeds natural column 0 with the identity, then repeatedly picks
// the column with the fewest legal completions, enumerates its completions
// in objective-first order, commits one and mirrors it into the other
// matrix. Dead ends unwind chronologically through an explicit frame stack.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "sage/errors.hpp"
#include "sage/mapping.hpp"
#include "sage/network.hpp"
#include "sage/schedule.hpp"
#include "sage/verify.hpp"

namespace sage {

struct Assignment {
  std::size_t datum = 0;
  Bank bank{};

  bool operator==(const Assignment&) const = default;
};

/// One bank per empty cell of a column, in row order.
using ColumnAssignment = std::vector<Assignment>;

/// `Enforce` keeps only objective-consistent banks; `Prefer` keeps every
/// structurally legal bank but lists the objective-consistent ones first.
enum class ObjectiveMode { Enforce, Prefer };

inline void initialize(MappingState& state) {
  if (!state.empty()) throw Error(ErrorCode::InvariantViolation, "initialize expects an empty state");
  const AccessSchedule& natural = state.schedules().natural;
  for (std::size_t row = 0; row < natural.rows(); ++row) state.assign(natural.at(row, 0), bank(row));
}

/// Completions of one column: an ordered bank list per empty cell, walked as
/// lexicographic tuples with repeated banks skipped.
class CandidateSet {
 public:
  struct Cell {
    std::size_t row = 0;
    std::size_t datum = 0;
    std::vector<Bank> options;

    bool operator==(const Cell&) const = default;
  };

  CandidateSet(const MappingState& state, ColumnRef col, NetworkObjective objective, ObjectiveMode mode)
      : objective_(objective), mode_(mode) {
    const AccessSchedule& schedule = state.schedule(col.side);
    for (std::size_t row = 0; row < schedule.rows(); ++row) {
      if (state.cell(col.side, row, col.index)) continue;
      const AdmissibleBanks admissible = admissible_banks(state, CellRef{col.side, row, col.index}, objective);
      cells_.push_back(Cell{row, schedule.at(row, col.index), admissible.ordered(mode == ObjectiveMode::Enforce)});
    }
    cursor_.assign(cells_.size(), kUnset);
  }

  const std::vector<Cell>& cells() const noexcept { return cells_; }

  /// True when some cell has no admissible bank at all.
  bool dead_end() const {
    return std::any_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c.options.empty(); });
  }

  /// Next completion in order, or nothing once exhausted. `state` must be the
  /// state the set was built from.
  std::optional<ColumnAssignment> next(const MappingState& state) {
    if (exhausted_ || cells_.empty()) {
      exhausted_ = true;
      return std::nullopt;
    }
    std::size_t depth = started_ ? cells_.size() - 1 : 0;
    started_ = true;
    while (true) {
      std::size_t& pos = cursor_[depth];
      pos = pos == kUnset ? 0 : pos + 1;
      if (pos >= cells_[depth].options.size()) {
        pos = kUnset;
        if (depth == 0) {
          exhausted_ = true;
          return std::nullopt;
        }
        --depth;
        continue;
      }
      if (!prefix_ok(state, depth)) continue;
      if (depth + 1 == cells_.size()) return current();
      ++depth;
    }
  }

  /// Number of completions, stopping early once `limit` is exceeded.
  std::size_t count(const MappingState& state, std::size_t limit = std::numeric_limits<std::size_t>::max()) const {
    CandidateSet copy = *this;
    copy.cursor_.assign(cells_.size(), kUnset);
    copy.started_ = false;
    copy.exhausted_ = false;
    std::size_t n = 0;
    while (n <= limit && copy.next(state)) ++n;
    return n;
  }

 private:
  static constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

  Bank chosen(std::size_t i) const { return cells_[i].options[cursor_[i]]; }

  bool prefix_ok(const MappingState& state, std::size_t depth) const {
    const Bank b = chosen(depth);
    for (std::size_t i = 0; i < depth; ++i) {
      if (chosen(i) == b) return false;
    }
    if (mode_ != ObjectiveMode::Enforce || depth == 0) return true;
    std::vector<detail::PendingAssignment> pending;
    pending.reserve(depth + 1);
    for (std::size_t i = 0; i <= depth; ++i) pending.push_back({cells_[i].datum, chosen(i)});
    return objective_consistent(state, objective_, pending);
  }

  ColumnAssignment current() const {
    ColumnAssignment out;
    out.reserve(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) out.push_back({cells_[i].datum, chosen(i)});
    return out;
  }

  NetworkObjective objective_;
  ObjectiveMode mode_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> cursor_;
  bool started_ = false;
  bool exhausted_ = false;
};

inline CandidateSet candidate_assignments(const MappingState& state, ColumnRef col, NetworkObjective objective,
                                          ObjectiveMode mode = ObjectiveMode::Prefer) {
  return CandidateSet(state, col, objective, mode);
}

/// Most constrained column with an empty cell: fewest completions, then
/// fewest empty cells, then IntSide before NatSide, then lowest index.
inline std::optional<ColumnRef> select_target_column(const MappingState& state,
                                                     NetworkObjective objective = NetworkObjective::crossbar(),
                                                     ObjectiveMode mode = ObjectiveMode::Prefer) {
  std::optional<ColumnRef> best;
  std::size_t best_count = std::numeric_limits<std::size_t>::max();
  std::size_t best_empty = std::numeric_limits<std::size_t>::max();
  for (MatrixSide side : {MatrixSide::IntSide, MatrixSide::NatSide}) {
    for (std::size_t col = 0; col < state.cycles(); ++col) {
      const std::size_t empty = state.empty_cells(side, col);
      if (empty == 0) continue;
      const ColumnRef ref{side, col};
      const std::size_t count = CandidateSet(state, ref, objective, mode).count(state, best_count);
      if (std::tie(count, empty) < std::tie(best_count, best_empty)) {
        best = ref;
        best_count = count;
        best_empty = empty;
      }
    }
  }
  return best;
}

/// Commits `tuple` into the column's empty cells (mirrored into the other
/// matrix). Throws InvariantViolation if it does not fit.
inline void apply_assignment(MappingState& state, ColumnRef col, const ColumnAssignment& tuple) {
  if (tuple.size() != state.empty_cells(col.side, col.index)) {
    throw Error(ErrorCode::InvariantViolation, "assignment does not cover the column's empty cells");
  }
  const AccessSchedule& schedule = state.schedule(col.side);
  std::size_t applied = 0;
  try {
    for (const Assignment& a : tuple) {
      if (schedule.position_of(a.datum).col != col.index) {
        throw Error(ErrorCode::InvariantViolation, "datum outside the target column", {a.datum});
      }
      state.assign(a.datum, a.bank);
      ++applied;
    }
  } catch (...) {
    for (std::size_t i = 0; i < applied; ++i) state.unassign(tuple[i].datum);
    throw;
  }
}

inline void retract_assignment(MappingState& state, const ColumnAssignment& tuple) {
  for (auto it = tuple.rbegin(); it != tuple.rend(); ++it) state.unassign(it->datum);
}

inline MappingState affect_and_report(MappingState state, ColumnRef col, const ColumnAssignment& tuple) {
  apply_assignment(state, col, tuple);
  return state;
}

enum class SolveStatus { Solved, Infeasible, BudgetExhausted };

constexpr std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

struct SolveOptions {
  bool relax_on_objective_failure = false;
  std::optional<std::uint64_t> max_nodes;
  bool trace = false;
};

struct SolveStats {
  std::uint64_t nodes = 0;
  std::uint64_t backtracks = 0;
  std::size_t max_depth = 0;

  bool operator==(const SolveStats&) const = default;
};

struct TraceEvent {
  enum class Kind { Select, Assign, Backtrack, Relax };

  Kind kind = Kind::Select;
  std::size_t depth = 0;
  ColumnRef column;
  std::vector<CandidateSet::Cell> lists;  // Select only
  ColumnAssignment assignment;            // Assign / Backtrack

  bool operator==(const TraceEvent&) const = default;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<BankMapping> mapping;
  bool objective_met = false;
  bool relaxed = false;  // solved only after dropping objective filtering
  SolveStats stats;
  std::vector<TraceEvent> trace;

  bool operator==(const SolveOutcome&) const = default;
};

namespace detail {

class MemMapSearch {
 public:
  MemMapSearch(const SchedulePair& schedules, NetworkObjective objective, ObjectiveMode mode,
               const SolveOptions& options, SolveOutcome& out)
      : state_(schedules), objective_(objective), mode_(mode), options_(options), out_(out) {}

  SolveStatus run() {
    initialize(state_);
    if (mode_ == ObjectiveMode::Enforce && !objective_consistent(state_, objective_)) return SolveStatus::Infeasible;
    if (!descend()) return SolveStatus::Solved;
    while (!frames_.empty()) {
      Frame& top = frames_.back();
      if (auto tuple = top.candidates.next(state_)) {
        if (options_.max_nodes && out_.stats.nodes >= *options_.max_nodes) return SolveStatus::BudgetExhausted;
        apply_assignment(state_, top.column, *tuple);
        top.applied = std::move(*tuple);
        ++out_.stats.nodes;
        out_.stats.max_depth = std::max(out_.stats.max_depth, frames_.size());
        record(TraceEvent::Kind::Assign, top.column, top.applied);
        if (!descend()) return SolveStatus::Solved;
        continue;
      }
      frames_.pop_back();
      if (frames_.empty()) break;
      Frame& parent = frames_.back();
      ++out_.stats.backtracks;
      record(TraceEvent::Kind::Backtrack, parent.column, parent.applied);
      retract_assignment(state_, parent.applied);
      parent.applied.clear();
    }
    return SolveStatus::Infeasible;
  }

  const MappingState& state() const { return state_; }

 private:
  struct Frame {
    ColumnRef column;
    CandidateSet candidates;
    ColumnAssignment applied;
  };

  // Pushes a frame for the next target column; false once the state is full.
  bool descend() {
    const auto col = select_target_column(state_, objective_, mode_);
    if (!col) return false;
    frames_.push_back(Frame{*col, CandidateSet(state_, *col, objective_, mode_), {}});
    if (options_.trace) {
      TraceEvent e;
      e.kind = TraceEvent::Kind::Select;
      e.depth = frames_.size();
      e.column = *col;
      e.lists = frames_.back().candidates.cells();
      out_.trace.push_back(std::move(e));
    }
    return true;
  }

  void record(TraceEvent::Kind kind, ColumnRef col, const ColumnAssignment& tuple) {
    if (!options_.trace) return;
    TraceEvent e;
    e.kind = kind;
    e.depth = frames_.size();
    e.column = col;
    e.assignment = tuple;
    out_.trace.push_back(std::move(e));
  }

  MappingState state_;
  NetworkObjective objective_;
  ObjectiveMode mode_;
  const SolveOptions& options_;
  SolveOutcome& out_;
  std::vector<Frame> frames_;
};

}  // namespace detail

inline SolveOutcome memmap_solve(const ProblemSpec& spec, NetworkObjective objective, const SolveOptions& options = {}) {
  const SchedulePair schedules = build_schedules(spec);
  SolveOutcome out;

  auto attempt = [&](ObjectiveMode mode) {
    detail::MemMapSearch search(schedules, objective, mode, options, out);
    out.status = search.run();
    if (out.status == SolveStatus::Solved) out.mapping = search.state().to_mapping();
  };

  attempt(ObjectiveMode::Enforce);
  if (out.status == SolveStatus::Infeasible && options.relax_on_objective_failure &&
      objective.kind != ObjectiveKind::Crossbar) {
    if (options.trace) out.trace.push_back(TraceEvent{TraceEvent::Kind::Relax, 0, {}, {}, {}});
    out.relaxed = true;
    attempt(ObjectiveMode::Prefer);
  }

  if (out.mapping) {
    const NetworkObjective query[] = {objective};
    const VerificationReport report = verify_mapping(*out.mapping, schedules, query);
    if (!report.valid) throw Error(ErrorCode::InvariantViolation, "solver produced a colliding mapping");
    out.objective_met = *report.objective_met_for(objective);
  }
  return out;
}

}  // namespace sage

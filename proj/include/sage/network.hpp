#pragma once

// Steering-network objectives: which column patterns a network can realize,
// how candidate banks are ranked against them, and the per-cycle control
// words replayed by a finished design.

#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sage/errors.hpp"
#include "sage/mapping.hpp"
#include "sage/schedule.hpp"

namespace sage {

enum class ObjectiveKind { Crossbar, BarrelShifter };

/// A steering-network rule. New kinds need a column-pattern predicate
/// (`pattern_matches`) and a partial-state consistency test
/// (`objective_consistent`); candidate ordering is derived from the latter.
struct NetworkObjective {
  ObjectiveKind kind = ObjectiveKind::Crossbar;

  static constexpr NetworkObjective crossbar() { return {ObjectiveKind::Crossbar}; }
  static constexpr NetworkObjective barrel_shifter() { return {ObjectiveKind::BarrelShifter}; }

  constexpr std::string_view name() const {
    return kind == ObjectiveKind::Crossbar ? "crossbar" : "barrel-shifter";
  }

  bool operator==(const NetworkObjective&) const = default;
};

inline std::optional<NetworkObjective> parse_objective(std::string_view name) {
  if (name == "crossbar") return NetworkObjective::crossbar();
  if (name == "barrel-shifter") return NetworkObjective::barrel_shifter();
  return std::nullopt;
}

/// The r with col[j] == reference[(j - r) mod X] for every row j, if any.
inline std::optional<std::size_t> rotation_offset(std::span<const Bank> reference, std::span<const Bank> col) {
  const std::size_t width = reference.size();
  if (width == 0 || col.size() != width) return std::nullopt;
  const auto head = std::find(reference.begin(), reference.end(), col[0]);
  if (head == reference.end()) return std::nullopt;
  const auto pos = static_cast<std::size_t>(head - reference.begin());
  const std::size_t r = (width - pos) % width;
  for (std::size_t j = 0; j < width; ++j) {
    if (col[j] != reference[(j + width - r) % width]) return std::nullopt;
  }
  return r;
}

inline bool pattern_matches(NetworkObjective objective, std::span<const Bank> reference, std::span<const Bank> col) {
  return objective.kind == ObjectiveKind::Crossbar || rotation_offset(reference, col).has_value();
}

namespace detail {

/// Solvability of  phase(bank) + shift(col) == row  (mod X)  over the filled
/// cells of one matrix, with distinct phases for the banks of a component.
/// A full matrix passes iff every column is a rotation of every other.
class RotationSystem {
 public:
  RotationSystem(std::size_t banks, std::size_t cols)
      : banks_(banks), parent_(banks + cols), offset_(banks + cols, 0) {
    for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = i;
  }

  bool add(std::size_t row, std::size_t col, Bank b) {
    // value(bank) - value(column node) == row, with value(column node) = -shift
    return unite(bank_index(b), banks_ + col, row % banks_);
  }

  bool phases_distinct() {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t b = 0; b < banks_; ++b) {
      if (!seen.insert(find(b)).second) return false;
    }
    return true;
  }

 private:
  std::pair<std::size_t, std::size_t> find(std::size_t x) {
    std::size_t pot = 0;
    std::size_t root = x;
    while (parent_[root] != root) {
      pot = (pot + offset_[root]) % banks_;
      root = parent_[root];
    }
    // path compression
    std::size_t acc = pot;
    while (parent_[x] != x) {
      const std::size_t next = parent_[x];
      const std::size_t step = offset_[x];
      parent_[x] = root;
      offset_[x] = acc;
      acc = (acc + banks_ - step) % banks_;
      x = next;
    }
    return {root, pot};
  }

  bool unite(std::size_t a, std::size_t b, std::size_t diff) {
    const auto [ra, pa] = find(a);
    const auto [rb, pb] = find(b);
    if (ra == rb) return (pa + banks_ - pb) % banks_ == diff;
    parent_[ra] = rb;
    offset_[ra] = (diff + pb + banks_ - pa) % banks_;
    return true;
  }

  std::size_t banks_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> offset_;
};

struct PendingAssignment {
  std::size_t datum;
  Bank bank;
};

inline bool side_consistent(const MappingState& state, MatrixSide side, std::span<const PendingAssignment> extra) {
  const std::size_t rows = state.bank_count();
  if (rows <= 1) return true;
  const std::size_t cols = state.cycles();
  RotationSystem system(rows, cols);
  for (std::size_t col = 0; col < cols; ++col) {
    for (std::size_t row = 0; row < rows; ++row) {
      if (const auto b = state.cell(side, row, col)) {
        if (!system.add(row, col, *b)) return false;
      }
    }
  }
  const AccessSchedule& schedule = state.schedule(side);
  for (const PendingAssignment& p : extra) {
    const CellPos pos = schedule.position_of(p.datum);
    if (!system.add(pos.row, pos.col, p.bank)) return false;
  }
  return system.phases_distinct();
}

}  // namespace detail

/// Whether the filled cells of `state`, plus `extra`, can still be completed
/// into matrices satisfying `objective`. Necessary, and exact once full.
inline bool objective_consistent(const MappingState& state, NetworkObjective objective,
                                 std::span<const detail::PendingAssignment> extra = {}) {
  if (objective.kind == ObjectiveKind::Crossbar) return true;
  return detail::side_consistent(state, MatrixSide::NatSide, extra) &&
         detail::side_consistent(state, MatrixSide::IntSide, extra);
}

/// Within each schedule, every column pattern must be realizable relative to column 0.
inline bool objective_compatible(const BankMapping& mapping, const SchedulePair& schedules,
                                 NetworkObjective objective) {
  if (objective.kind == ObjectiveKind::Crossbar) return true;
  for (AccessOrder order : {AccessOrder::Natural, AccessOrder::Interleaved}) {
    const AccessSchedule& schedule = schedules[order];
    const ColumnPattern reference = mapping.pattern(schedule, 0);
    for (std::size_t col = 1; col < schedule.cols(); ++col) {
      if (!pattern_matches(objective, reference, mapping.pattern(schedule, col))) return false;
    }
  }
  return true;
}

/// Structurally legal banks for one empty cell, split by whether they keep
/// the objective reachable. Both parts ascend by bank id.
struct AdmissibleBanks {
  std::vector<Bank> preferred;
  std::vector<Bank> others;

  /// Objective-first order; `enforce` drops the non-conforming tail.
  std::vector<Bank> ordered(bool enforce) const {
    std::vector<Bank> out = preferred;
    if (!enforce) out.insert(out.end(), others.begin(), others.end());
    return out;
  }
};

inline AdmissibleBanks admissible_banks(const MappingState& state, CellRef cell, NetworkObjective objective) {
  const std::size_t datum = state.schedule(cell.side).at(cell.row, cell.col);
  AdmissibleBanks out;
  if (state.bank_of(datum)) return out;
  for (std::size_t i = 0; i < state.bank_count(); ++i) {
    const Bank b = bank(i);
    if (!state.can_assign(datum, b)) continue;
    const detail::PendingAssignment pending[] = {{datum, b}};
    (objective_consistent(state, objective, pending) ? out.preferred : out.others).push_back(b);
  }
  return out;
}

/// Control words of one access order.
struct OrderControls {
  ObjectiveKind kind = ObjectiveKind::Crossbar;
  ColumnPattern reference;                // column 0 pattern
  std::vector<std::size_t> rotations;     // barrel shifter: one offset per cycle
  std::vector<ColumnPattern> routes;      // crossbar: PE -> bank per cycle
  std::size_t distinct_word_count = 0;

  std::size_t cycles() const { return kind == ObjectiveKind::BarrelShifter ? rotations.size() : routes.size(); }

  /// Bank reached by `pe` at `cycle` when word `cycle` drives the network.
  Bank route(std::size_t pe, std::size_t cycle) const {
    if (kind == ObjectiveKind::Crossbar) return routes[cycle][pe];
    const std::size_t width = reference.size();
    return reference[(pe + width - rotations[cycle] % width) % width];
  }

  bool operator==(const OrderControls&) const = default;
};

struct ControlSchedule {
  OrderControls natural;
  OrderControls interleaved;

  const OrderControls& operator[](AccessOrder order) const {
    return order == AccessOrder::Natural ? natural : interleaved;
  }
  OrderControls& operator[](AccessOrder order) { return order == AccessOrder::Natural ? natural : interleaved; }

  bool operator==(const ControlSchedule&) const = default;
};

inline ControlSchedule derive_controls(const BankMapping& mapping, const SchedulePair& schedules,
                                       NetworkObjective objective) {
  if (!objective_compatible(mapping, schedules, objective)) {
    throw Error(ErrorCode::ObjectiveIncompatible,
                "mapping cannot be driven by a " + std::string(objective.name()) + " network");
  }
  ControlSchedule out;
  for (AccessOrder order : {AccessOrder::Natural, AccessOrder::Interleaved}) {
    const AccessSchedule& schedule = schedules[order];
    OrderControls& ctl = out[order];
    ctl.kind = objective.kind;
    ctl.reference = mapping.pattern(schedule, 0);
    if (objective.kind == ObjectiveKind::BarrelShifter) {
      for (std::size_t col = 0; col < schedule.cols(); ++col) {
        ctl.rotations.push_back(*rotation_offset(ctl.reference, mapping.pattern(schedule, col)));
      }
      ctl.distinct_word_count = std::set<std::size_t>(ctl.rotations.begin(), ctl.rotations.end()).size();
    } else {
      for (std::size_t col = 0; col < schedule.cols(); ++col) ctl.routes.push_back(mapping.pattern(schedule, col));
      ctl.distinct_word_count = std::set<ColumnPattern>(ctl.routes.begin(), ctl.routes.end()).size();
    }
  }
  return out;
}

}  // namespace sage

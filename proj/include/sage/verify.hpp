#pragma once

// Independent checking machinery: collision verifier, a partition-based
// restatement of the mapping definition, an access simulator and an
// exhaustive oracle for small blocks.

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sage/errors.hpp"
#include "sage/mapping.hpp"
#include "sage/network.hpp"
#include "sage/schedule.hpp"

namespace sage {

struct Conflict {
  AccessOrder order = AccessOrder::Natural;
  std::size_t cycle = 0;
  Bank bank{};
  std::size_t first = 0;  // first < second
  std::size_t second = 0;

  bool operator==(const Conflict&) const = default;
};

struct VerificationReport {
  bool valid = false;
  std::vector<Conflict> conflicts;
  std::vector<std::vector<std::size_t>> bank_contents;
  std::vector<std::pair<NetworkObjective, bool>> objective_met;

  std::optional<bool> objective_met_for(NetworkObjective objective) const {
    for (const auto& [obj, met] : objective_met) {
      if (obj == objective) return met;
    }
    return std::nullopt;
  }
};

inline void require_covers(const BankMapping& mapping, const SchedulePair& schedules) {
  if (mapping.size() < schedules.length()) {
    std::vector<std::size_t> missing(schedules.length() - mapping.size());
    std::iota(missing.begin(), missing.end(), mapping.size());
    throw Error(ErrorCode::IncompleteMapping, std::to_string(missing.size()) + " data have no bank", missing);
  }
  if (mapping.size() != schedules.length() || mapping.bank_count() != schedules.parallelism()) {
    throw Error(ErrorCode::InvariantViolation, "mapping shape does not match the schedules");
  }
}

/// Checks both collision constraints column by column and reports every colliding pair.
inline VerificationReport verify_mapping(const BankMapping& mapping, const SchedulePair& schedules,
                                         std::span<const NetworkObjective> objectives = {}) {
  require_covers(mapping, schedules);
  VerificationReport report;
  for (AccessOrder order : {AccessOrder::Natural, AccessOrder::Interleaved}) {
    const AccessSchedule& schedule = schedules[order];
    for (std::size_t col = 0; col < schedule.cols(); ++col) {
      for (std::size_t a = 0; a < schedule.rows(); ++a) {
        for (std::size_t b = a + 1; b < schedule.rows(); ++b) {
          const std::size_t da = schedule.at(a, col);
          const std::size_t db = schedule.at(b, col);
          if (mapping[da] == mapping[db]) {
            report.conflicts.push_back({order, col, mapping[da], std::min(da, db), std::max(da, db)});
          }
        }
      }
    }
  }
  report.valid = report.conflicts.empty();
  report.bank_contents = mapping.contents();
  for (NetworkObjective objective : objectives) {
    report.objective_met.emplace_back(objective, objective_compatible(mapping, schedules, objective));
  }
  return report;
}

/// The mapping definition restated straight from the two partitions of the
/// block: data sharing a natural cycle or an interleaved cycle must sit in
/// different banks. Deliberately avoids AccessSchedule.
inline bool satisfies_mapping_definition(const BankMapping& mapping, const ProblemSpec& spec) {
  const std::size_t length = spec.length();
  const std::size_t rows = spec.parallelism();
  const std::size_t cols = spec.cycles();
  if (mapping.size() != length) return false;

  // cycle at which each datum is touched, per partition
  std::vector<std::size_t> nat_cycle(length);
  std::vector<std::size_t> int_cycle(length);
  for (std::size_t k = 0; k < length; ++k) {
    nat_cycle[k] = spec.conventions().natural_fill == FillOrder::RowMajorBlocks ? k % cols : k / rows;
    const std::size_t int_col =
        spec.conventions().interleaved_fill == FillOrder::RowMajorBlocks ? k % cols : k / rows;
    int_cycle[spec.permutation()[k]] = int_col;
  }
  for (std::size_t i = 0; i < length; ++i) {
    if (bank_index(mapping[i]) >= rows) return false;
    for (std::size_t j = i + 1; j < length; ++j) {
      const bool together = nat_cycle[i] == nat_cycle[j] || int_cycle[i] == int_cycle[j];
      if (together && mapping[i] == mapping[j]) return false;
    }
  }
  return true;
}

struct AccessEvent {
  std::size_t pe = 0;
  std::size_t datum = 0;
  Bank bank{};

  bool operator==(const AccessEvent&) const = default;
};

/// Executed accesses: per order, per cycle, one event per PE.
struct AccessTrace {
  std::vector<std::vector<AccessEvent>> natural;
  std::vector<std::vector<AccessEvent>> interleaved;

  const std::vector<std::vector<AccessEvent>>& operator[](AccessOrder order) const {
    return order == AccessOrder::Natural ? natural : interleaved;
  }
};

/// Replays both access orders. With `controls`, every PE's route through the
/// control word of the cycle must land on the bank that holds its datum.
inline AccessTrace simulate(const BankMapping& mapping, const SchedulePair& schedules,
                            const ControlSchedule* controls = nullptr) {
  require_covers(mapping, schedules);
  AccessTrace trace;
  for (AccessOrder order : {AccessOrder::Natural, AccessOrder::Interleaved}) {
    const AccessSchedule& schedule = schedules[order];
    auto& cycles = order == AccessOrder::Natural ? trace.natural : trace.interleaved;
    cycles.resize(schedule.cols());
    for (std::size_t t = 0; t < schedule.cols(); ++t) {
      for (std::size_t pe = 0; pe < schedule.rows(); ++pe) {
        const std::size_t datum = schedule.at(pe, t);
        const Bank target = mapping[datum];
        if (controls) {
          const OrderControls& words = (*controls)[order];
          if (t >= words.cycles() || words.route(pe, t) != target) {
            throw Error(ErrorCode::ControlMismatch,
                        std::string(to_string(order)) + " cycle " + std::to_string(t) + " PE " + std::to_string(pe),
                        {order == AccessOrder::Natural ? 0u : 1u, t, pe});
          }
        }
        cycles[t].push_back({pe, datum, target});
      }
    }
  }
  return trace;
}

inline constexpr std::size_t kOracleMaxLength = 16;
inline constexpr std::size_t kOracleMaxBanks = 4;

/// Every mapping satisfying both collision constraints (and `objective`),
/// enumerated as one bank permutation per natural column in lexicographic
/// order. With `fix_first_column`, natural column 0 is pinned to the identity.
inline std::vector<BankMapping> brute_force_solve(const SchedulePair& schedules, NetworkObjective objective,
                                                  bool fix_first_column) {
  const std::size_t length = schedules.length();
  const std::size_t rows = schedules.parallelism();
  const std::size_t cols = schedules.cycles();
  if (length > kOracleMaxLength || rows > kOracleMaxBanks) {
    throw Error(ErrorCode::InstanceTooLarge,
                "oracle limited to L <= 16 and X <= 4 (got L=" + std::to_string(length) +
                    ", X=" + std::to_string(rows) + ")",
                {length, rows});
  }

  std::vector<std::vector<Bank>> perms;
  std::vector<Bank> p(rows);
  for (std::size_t i = 0; i < rows; ++i) p[i] = bank(i);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  const AccessSchedule& natural = schedules.natural;
  const AccessSchedule& interleaved = schedules.interleaved;
  std::vector<Bank> assigned(length);
  std::vector<bool> known(length, false);
  std::vector<std::size_t> choice(cols, 0);
  std::vector<BankMapping> out;

  // interleaved columns stay collision-free over the data decided so far
  auto int_ok = [&](std::size_t natural_col) {
    for (std::size_t row = 0; row < rows; ++row) {
      const CellPos pos = interleaved.position_of(natural.at(row, natural_col));
      for (std::size_t other = 0; other < rows; ++other) {
        const std::size_t d = interleaved.at(other, pos.col);
        if (other != pos.row && known[d] && assigned[d] == assigned[natural.at(row, natural_col)]) return false;
      }
    }
    return true;
  };

  auto place = [&](std::size_t col, bool on) {
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t d = natural.at(row, col);
      known[d] = on;
      if (on) assigned[d] = perms[choice[col]][row];
    }
  };

  auto recurse = [&](auto&& self, std::size_t col) -> void {
    if (col == cols) {
      BankMapping m(rows, assigned);
      if (objective_compatible(m, schedules, objective)) out.push_back(std::move(m));
      return;
    }
    const std::size_t end = (fix_first_column && col == 0) ? 1 : perms.size();
    for (std::size_t k = 0; k < end; ++k) {
      choice[col] = k;
      place(col, true);
      if (int_ok(col)) self(self, col + 1);
      place(col, false);
    }
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace sage

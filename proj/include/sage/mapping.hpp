#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sage/errors.hpp"
#include "sage/schedule.hpp"

namespace sage {

/// Memory bank identifier in [0, X).
enum class Bank : std::uint32_t {};

constexpr Bank bank(std::size_t index) { return static_cast<Bank>(index); }
constexpr std::size_t bank_index(Bank b) { return static_cast<std::size_t>(b); }

/// A, B, C, ...; banks past Z fall back to "B<n>".
inline std::string bank_label(Bank b) {
  const std::size_t i = bank_index(b);
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "B" + std::to_string(i);
}

/// The banks of one column, indexed by PE row.
using ColumnPattern = std::vector<Bank>;

/// Partially decided data -> bank table, indexed by datum.
using PartialMapping = std::vector<std::optional<Bank>>;

/// Total function datum -> bank.
class BankMapping {
 public:
  BankMapping(std::size_t bank_count, std::vector<Bank> bank_of)
      : bank_count_(bank_count), bank_of_(std::move(bank_of)) {
    for (std::size_t d = 0; d < bank_of_.size(); ++d) {
      if (bank_index(bank_of_[d]) >= bank_count_) {
        throw Error(ErrorCode::OutOfRange, "datum " + std::to_string(d) + " mapped past the last bank", {d});
      }
    }
  }

  static BankMapping from_partial(std::size_t bank_count, std::span<const std::optional<Bank>> partial) {
    std::vector<std::size_t> missing;
    std::vector<Bank> out(partial.size());
    for (std::size_t d = 0; d < partial.size(); ++d) {
      if (partial[d]) {
        out[d] = *partial[d];
      } else {
        missing.push_back(d);
      }
    }
    if (!missing.empty()) {
      throw Error(ErrorCode::IncompleteMapping, std::to_string(missing.size()) + " data have no bank", missing);
    }
    return BankMapping(bank_count, std::move(out));
  }

  /// Builds a mapping from per-bank content lists (list b holds the data of bank b).
  static BankMapping from_bank_lists(std::size_t length, const std::vector<std::vector<std::size_t>>& lists) {
    PartialMapping partial(length);
    for (std::size_t b = 0; b < lists.size(); ++b) {
      for (std::size_t datum : lists[b]) {
        if (datum >= length) {
          throw Error(ErrorCode::OutOfRange, "datum " + std::to_string(datum) + " outside the block", {datum});
        }
        if (partial[datum]) {
          throw Error(ErrorCode::DuplicateEntry, "datum " + std::to_string(datum) + " stored in two banks",
                      {datum});
        }
        partial[datum] = bank(b);
      }
    }
    return from_partial(lists.size(), partial);
  }

  std::size_t bank_count() const noexcept { return bank_count_; }
  std::size_t size() const noexcept { return bank_of_.size(); }
  Bank operator[](std::size_t datum) const { return bank_of_[datum]; }
  std::span<const Bank> banks() const noexcept { return bank_of_; }

  /// Data stored in each bank, ascending.
  std::vector<std::vector<std::size_t>> contents() const {
    std::vector<std::vector<std::size_t>> out(bank_count_);
    for (std::size_t d = 0; d < bank_of_.size(); ++d) out[bank_index(bank_of_[d])].push_back(d);
    return out;
  }

  ColumnPattern pattern(const AccessSchedule& schedule, std::size_t col) const {
    ColumnPattern out(schedule.rows());
    for (std::size_t row = 0; row < schedule.rows(); ++row) out[row] = bank_of_[schedule.at(row, col)];
    return out;
  }

  /// Applies `relabel[old] = new` to every datum.
  BankMapping relabeled(std::span<const Bank> relabel) const {
    std::vector<Bank> out(bank_of_.size());
    for (std::size_t d = 0; d < bank_of_.size(); ++d) out[d] = relabel[bank_index(bank_of_[d])];
    return BankMapping(bank_count_, std::move(out));
  }

  bool operator==(const BankMapping&) const = default;

 private:
  std::size_t bank_count_;
  std::vector<Bank> bank_of_;
};

/// True when `a` and `b` differ only by a renaming of banks.
inline bool equal_up_to_relabeling(const BankMapping& a, const BankMapping& b) {
  if (a.size() != b.size() || a.bank_count() != b.bank_count()) return false;
  std::vector<std::optional<Bank>> forward(a.bank_count());
  std::vector<std::optional<Bank>> backward(a.bank_count());
  for (std::size_t d = 0; d < a.size(); ++d) {
    auto& f = forward[bank_index(a[d])];
    auto& r = backward[bank_index(b[d])];
    if (!f) f = b[d];
    if (!r) r = a[d];
    if (*f != b[d] || *r != a[d]) return false;
  }
  return true;
}

enum class MatrixSide { NatSide, IntSide };

constexpr MatrixSide other_side(MatrixSide side) {
  return side == MatrixSide::NatSide ? MatrixSide::IntSide : MatrixSide::NatSide;
}
constexpr AccessOrder order_of(MatrixSide side) {
  return side == MatrixSide::NatSide ? AccessOrder::Natural : AccessOrder::Interleaved;
}
constexpr std::string_view to_string(MatrixSide side) {
  return side == MatrixSide::NatSide ? "nat" : "int";
}

struct ColumnRef {
  MatrixSide side = MatrixSide::NatSide;
  std::size_t index = 0;

  bool operator==(const ColumnRef&) const = default;
};

struct CellRef {
  MatrixSide side = MatrixSide::NatSide;
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const CellRef&) const = default;
};

/// The paired mapping matrices MAP_Nat / MAP_Int plus the datum -> bank table.
///
/// Invariants maintained by assign/unassign:
///  - a datum's cells in both matrices are both empty or both hold bank_of(datum);
///  - no bank occurs twice among the filled cells of a column.
class MappingState {
 public:
  explicit MappingState(SchedulePair schedules)
      : schedules_(std::move(schedules)),
        map_nat_(schedules_.length()),
        map_int_(schedules_.length()),
        bank_of_(schedules_.length()) {}

  const SchedulePair& schedules() const noexcept { return schedules_; }
  const AccessSchedule& schedule(MatrixSide side) const { return schedules_[order_of(side)]; }
  std::size_t bank_count() const noexcept { return schedules_.parallelism(); }
  std::size_t cycles() const noexcept { return schedules_.cycles(); }
  std::size_t length() const noexcept { return schedules_.length(); }

  std::optional<Bank> cell(MatrixSide side, std::size_t row, std::size_t col) const {
    return matrix(side)[row * cycles() + col];
  }
  std::optional<Bank> bank_of(std::size_t datum) const { return bank_of_[datum]; }
  const PartialMapping& partial() const noexcept { return bank_of_; }

  std::vector<std::optional<Bank>> column(MatrixSide side, std::size_t col) const {
    std::vector<std::optional<Bank>> out(bank_count());
    for (std::size_t row = 0; row < bank_count(); ++row) out[row] = cell(side, row, col);
    return out;
  }

  bool column_uses(MatrixSide side, std::size_t col, Bank b) const {
    for (std::size_t row = 0; row < bank_count(); ++row) {
      if (cell(side, row, col) == b) return true;
    }
    return false;
  }

  std::size_t empty_cells(MatrixSide side, std::size_t col) const {
    std::size_t n = 0;
    for (std::size_t row = 0; row < bank_count(); ++row) n += cell(side, row, col) ? 0 : 1;
    return n;
  }

  bool empty() const {
    return std::none_of(bank_of_.begin(), bank_of_.end(), [](const auto& b) { return b.has_value(); });
  }
  bool complete() const {
    return std::all_of(bank_of_.begin(), bank_of_.end(), [](const auto& b) { return b.has_value(); });
  }

  /// Structural legality of placing `datum` in bank `b`.
  bool can_assign(std::size_t datum, Bank b) const {
    if (bank_of_[datum] || bank_index(b) >= bank_count()) return false;
    const CellPos nat = schedules_.natural.position_of(datum);
    const CellPos inter = schedules_.interleaved.position_of(datum);
    return !column_uses(MatrixSide::NatSide, nat.col, b) && !column_uses(MatrixSide::IntSide, inter.col, b);
  }

  /// Places `datum` in bank `b` and mirrors it into both matrices.
  void assign(std::size_t datum, Bank b) {
    if (!can_assign(datum, b)) {
      throw Error(ErrorCode::InvariantViolation,
                  "datum " + std::to_string(datum) + " cannot take bank " + bank_label(b), {datum, bank_index(b)});
    }
    const CellPos nat = schedules_.natural.position_of(datum);
    const CellPos inter = schedules_.interleaved.position_of(datum);
    bank_of_[datum] = b;
    map_nat_[nat.row * cycles() + nat.col] = b;
    map_int_[inter.row * cycles() + inter.col] = b;
  }

  void unassign(std::size_t datum) {
    if (!bank_of_[datum]) {
      throw Error(ErrorCode::InvariantViolation, "datum " + std::to_string(datum) + " is not assigned", {datum});
    }
    const CellPos nat = schedules_.natural.position_of(datum);
    const CellPos inter = schedules_.interleaved.position_of(datum);
    bank_of_[datum].reset();
    map_nat_[nat.row * cycles() + nat.col].reset();
    map_int_[inter.row * cycles() + inter.col].reset();
  }

  BankMapping to_mapping() const { return BankMapping::from_partial(bank_count(), bank_of_); }

  bool operator==(const MappingState&) const = default;

 private:
  const std::vector<std::optional<Bank>>& matrix(MatrixSide side) const {
    return side == MatrixSide::NatSide ? map_nat_ : map_int_;
  }

  SchedulePair schedules_;
  std::vector<std::optional<Bank>> map_nat_;
  std::vector<std::optional<Bank>> map_int_;
  PartialMapping bank_of_;
};

}  // namespace sage

#pragma once

// Interleaving law and the two reference access matrices.
//
// A schedule is an X x N matrix of data indices: row p is the access stream
// of processing element p, column t is the set of data touched concurrently
// at cycle t.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sage/errors.hpp"

namespace sage {

class Permutation {
 public:
  static Permutation from_entries(std::vector<std::size_t> entries) {
    if (entries.empty()) throw Error(ErrorCode::EmptyInput, "permutation is empty");
    const std::size_t n = entries.size();
    std::vector<bool> seen(n, false);
    for (std::size_t value : entries) {
      if (value >= n) {
        throw Error(ErrorCode::OutOfRange,
                    "entry " + std::to_string(value) + " outside [0, " + std::to_string(n) + ")",
                    {value});
      }
      if (seen[value]) {
        throw Error(ErrorCode::DuplicateEntry, "entry " + std::to_string(value) + " repeated", {value});
      }
      seen[value] = true;
    }
    return Permutation(std::move(entries));
  }

  static Permutation identity(std::size_t length) {
    std::vector<std::size_t> entries(length);
    for (std::size_t i = 0; i < length; ++i) entries[i] = i;
    return from_entries(std::move(entries));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t operator[](std::size_t i) const { return entries_[i]; }
  std::span<const std::size_t> entries() const noexcept { return entries_; }

  bool operator==(const Permutation&) const = default;

 private:
  explicit Permutation(std::vector<std::size_t> entries) : entries_(std::move(entries)) {}

  std::vector<std::size_t> entries_;
};

/// How a length-L sequence is laid into an X x N matrix.
enum class FillOrder {
  RowMajorBlocks,       // cell(p, t) = seq[p * N + t]
  ColumnMajorSequence,  // cell(p, t) = seq[t * X + p]
};

constexpr std::size_t fill_index(FillOrder order, std::size_t row, std::size_t col, std::size_t rows,
                                 std::size_t cols) {
  return order == FillOrder::RowMajorBlocks ? row * cols + col : col * rows + row;
}

struct LayoutConventions {
  FillOrder natural_fill = FillOrder::RowMajorBlocks;
  FillOrder interleaved_fill = FillOrder::ColumnMajorSequence;

  bool operator==(const LayoutConventions&) const = default;
};

class ProblemSpec {
 public:
  static ProblemSpec make(Permutation permutation, std::size_t parallelism, LayoutConventions conventions = {}) {
    const std::size_t length = permutation.size();
    if (parallelism == 0 || length % parallelism != 0) {
      throw Error(ErrorCode::NonDivisorParallelism,
                  "parallelism " + std::to_string(parallelism) + " does not divide length " +
                      std::to_string(length),
                  {parallelism, length});
    }
    return ProblemSpec(std::move(permutation), parallelism, conventions);
  }

  const Permutation& permutation() const noexcept { return permutation_; }
  std::size_t length() const noexcept { return permutation_.size(); }
  std::size_t parallelism() const noexcept { return parallelism_; }
  std::size_t cycles() const noexcept { return permutation_.size() / parallelism_; }
  const LayoutConventions& conventions() const noexcept { return conventions_; }

  bool operator==(const ProblemSpec&) const = default;

 private:
  ProblemSpec(Permutation permutation, std::size_t parallelism, LayoutConventions conventions)
      : permutation_(std::move(permutation)), parallelism_(parallelism), conventions_(conventions) {}

  Permutation permutation_;
  std::size_t parallelism_;
  LayoutConventions conventions_;
};

enum class AccessOrder { Natural, Interleaved };

constexpr std::string_view to_string(AccessOrder order) {
  return order == AccessOrder::Natural ? "natural" : "interleaved";
}

struct CellPos {
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const CellPos&) const = default;
};

class AccessSchedule {
 public:
  /// `cells` is row-major and must hold every index of [0, rows*cols) once.
  AccessSchedule(AccessOrder order, std::size_t rows, std::size_t cols, std::vector<std::size_t> cells)
      : order_(order), rows_(rows), cols_(cols), cells_(std::move(cells)), where_(cells_.size()) {
    if (rows == 0 || cols == 0 || cells_.size() != rows * cols) {
      throw Error(ErrorCode::InvariantViolation, "schedule shape does not match its cell count");
    }
    std::vector<bool> seen(cells_.size(), false);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const std::size_t datum = cells_[i];
      if (datum >= cells_.size() || seen[datum]) {
        throw Error(ErrorCode::InvariantViolation, "schedule is not a partition of the data", {datum});
      }
      seen[datum] = true;
      where_[datum] = CellPos{i / cols, i % cols};
    }
  }

  AccessOrder order() const noexcept { return order_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return cells_.size(); }

  std::size_t at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  CellPos position_of(std::size_t datum) const { return where_[datum]; }

  std::vector<std::size_t> column(std::size_t col) const {
    std::vector<std::size_t> out(rows_);
    for (std::size_t row = 0; row < rows_; ++row) out[row] = at(row, col);
    return out;
  }

  std::vector<std::size_t> row(std::size_t row) const {
    return {cells_.begin() + static_cast<std::ptrdiff_t>(row * cols_),
            cells_.begin() + static_cast<std::ptrdiff_t>((row + 1) * cols_)};
  }

  bool operator==(const AccessSchedule& other) const {
    return order_ == other.order_ && rows_ == other.rows_ && cols_ == other.cols_ && cells_ == other.cells_;
  }

 private:
  AccessOrder order_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> cells_;
  std::vector<CellPos> where_;
};

struct SchedulePair {
  AccessSchedule natural;
  AccessSchedule interleaved;

  const AccessSchedule& operator[](AccessOrder order) const {
    return order == AccessOrder::Natural ? natural : interleaved;
  }
  std::size_t parallelism() const noexcept { return natural.rows(); }
  std::size_t cycles() const noexcept { return natural.cols(); }
  std::size_t length() const noexcept { return natural.size(); }

  bool operator==(const SchedulePair&) const = default;
};

inline SchedulePair build_schedules(const ProblemSpec& spec) {
  const std::size_t rows = spec.parallelism();
  const std::size_t cols = spec.cycles();
  const auto& conv = spec.conventions();
  std::vector<std::size_t> natural(spec.length());
  std::vector<std::size_t> interleaved(spec.length());
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t col = 0; col < cols; ++col) {
      natural[row * cols + col] = fill_index(conv.natural_fill, row, col, rows, cols);
      interleaved[row * cols + col] = spec.permutation()[fill_index(conv.interleaved_fill, row, col, rows, cols)];
    }
  }
  return SchedulePair{AccessSchedule(AccessOrder::Natural, rows, cols, std::move(natural)),
                      AccessSchedule(AccessOrder::Interleaved, rows, cols, std::move(interleaved))};
}

}  // namespace sage

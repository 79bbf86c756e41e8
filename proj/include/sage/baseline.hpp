#pragma once

// Network-agnostic comparison mapper: tiled natural layout, greedy fill, then
// conflict-chain repair of the cells the greedy pass left empty.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sage/errors.hpp"
#include "sage/mapping.hpp"
#include "sage/schedule.hpp"

namespace sage {

/// The natural layout annotated with, for each datum, the interleaved cycle
/// that touches it. Data sharing a tile id are read together in interleaved order.
class TileMatrix {
 public:
  TileMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> data, std::vector<std::size_t> tiles)
      : rows_(rows), cols_(cols), data_(std::move(data)), tiles_(std::move(tiles)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t length() const noexcept { return data_.size(); }
  std::size_t tile(std::size_t row, std::size_t col) const { return tiles_[row * cols_ + col]; }
  std::size_t datum(std::size_t row, std::size_t col) const { return data_[row * cols_ + col]; }

  bool operator==(const TileMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> data_;
  std::vector<std::size_t> tiles_;
};

inline TileMatrix build_tiles(const SchedulePair& schedules) {
  const AccessSchedule& natural = schedules.natural;
  std::vector<std::size_t> data(natural.size());
  std::vector<std::size_t> tiles(natural.size());
  for (std::size_t row = 0; row < natural.rows(); ++row) {
    for (std::size_t col = 0; col < natural.cols(); ++col) {
      const std::size_t d = natural.at(row, col);
      data[row * natural.cols() + col] = d;
      tiles[row * natural.cols() + col] = schedules.interleaved.position_of(d).col;
    }
  }
  return TileMatrix(natural.rows(), natural.cols(), std::move(data), std::move(tiles));
}

namespace detail {

// Which datum holds each bank, per natural column and per tile.
class HolderTable {
 public:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  explicit HolderTable(const TileMatrix& tiles)
      : banks_(tiles.rows()),
        column_(tiles.cols() * tiles.rows(), kNone),
        tile_(tiles.cols() * tiles.rows(), kNone) {}

  std::size_t in_column(std::size_t col, Bank b) const { return column_[col * banks_ + bank_index(b)]; }
  std::size_t in_tile(std::size_t tile, Bank b) const { return tile_[tile * banks_ + bank_index(b)]; }

  void set(std::size_t col, std::size_t tile, Bank b, std::size_t datum) {
    column_[col * banks_ + bank_index(b)] = datum;
    tile_[tile * banks_ + bank_index(b)] = datum;
  }

 private:
  std::size_t banks_;
  std::vector<std::size_t> column_;
  std::vector<std::size_t> tile_;
};

}  // namespace detail

/// Column-major, top-down scan. Each cell takes its row's bank when neither
/// its column nor its tile-mates already use it, else the lowest free bank,
/// else stays empty.
inline PartialMapping greedy_fill(const TileMatrix& tiles) {
  PartialMapping out(tiles.length());
  detail::HolderTable holders(tiles);
  for (std::size_t col = 0; col < tiles.cols(); ++col) {
    for (std::size_t row = 0; row < tiles.rows(); ++row) {
      const std::size_t tile = tiles.tile(row, col);
      auto is_free = [&](Bank b) {
        return holders.in_column(col, b) == holders.kNone && holders.in_tile(tile, b) == holders.kNone;
      };
      std::optional<Bank> pick;
      if (is_free(bank(row))) {
        pick = bank(row);
      } else {
        for (std::size_t i = 0; i < tiles.rows() && !pick; ++i) {
          if (is_free(bank(i))) pick = bank(i);
        }
      }
      if (pick) {
        out[tiles.datum(row, col)] = pick;
        holders.set(col, tile, *pick, tiles.datum(row, col));
      }
    }
  }
  return out;
}

inline std::size_t default_repair_budget(std::size_t length) { return 1000 * length; }

/// Completes a conflict-free partial mapping. Each empty cell is forced to a
/// bank free in its column (picked by the seeded generator); the tile-mate it
/// collides with is moved to a bank free in the tile, which may collide in its
/// own column, and so on down the alternating chain until no conflict is left.
inline BankMapping repair_complete(PartialMapping partial, const TileMatrix& tiles, std::uint64_t seed,
                                   std::optional<std::size_t> budget = std::nullopt) {
  const std::size_t banks = tiles.rows();
  const std::size_t limit = budget.value_or(default_repair_budget(tiles.length()));
  if (partial.size() != tiles.length()) {
    throw Error(ErrorCode::InvariantViolation, "partial mapping does not match the tile matrix");
  }

  std::vector<std::size_t> col_of(tiles.length());
  std::vector<std::size_t> tile_of(tiles.length());
  detail::HolderTable holders(tiles);
  for (std::size_t row = 0; row < tiles.rows(); ++row) {
    for (std::size_t col = 0; col < tiles.cols(); ++col) {
      const std::size_t d = tiles.datum(row, col);
      col_of[d] = col;
      tile_of[d] = tiles.tile(row, col);
      if (!partial[d]) continue;
      const Bank b = *partial[d];
      if (bank_index(b) >= banks || holders.in_column(col, b) != holders.kNone ||
          holders.in_tile(tile_of[d], b) != holders.kNone) {
        throw Error(ErrorCode::InvariantViolation, "partial mapping already collides", {d});
      }
      holders.set(col, tile_of[d], b, d);
    }
  }

  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<Bank>& options) {
    std::uniform_int_distribution<std::size_t> dist(0, options.size() - 1);
    return options[dist(rng)];
  };

  std::size_t steps = 0;
  for (std::size_t col = 0; col < tiles.cols(); ++col) {
    for (std::size_t row = 0; row < tiles.rows(); ++row) {
      const std::size_t d = tiles.datum(row, col);
      if (partial[d]) continue;
      const std::size_t tile = tile_of[d];

      std::vector<Bank> free_in_col;
      std::vector<Bank> free_in_tile;
      for (std::size_t i = 0; i < banks; ++i) {
        if (holders.in_column(col, bank(i)) == holders.kNone) free_in_col.push_back(bank(i));
        if (holders.in_tile(tile, bank(i)) == holders.kNone) free_in_tile.push_back(bank(i));
      }
      const Bank forced = pick(free_in_col);
      const Bank spare = pick(free_in_tile);

      // Collect the alternating chain forced -> spare -> forced ... starting at the tile.
      std::vector<std::size_t> chain;
      bool at_tile = true;
      std::size_t where = tile;
      Bank want = forced;
      while (true) {
        const std::size_t holder = at_tile ? holders.in_tile(where, want) : holders.in_column(where, want);
        if (holder == holders.kNone) break;
        if (++steps > limit) {
          throw Error(ErrorCode::RepairBudgetExhausted, "repair exceeded " + std::to_string(limit) + " steps",
                      {limit});
        }
        chain.push_back(holder);
        where = at_tile ? col_of[holder] : tile_of[holder];
        at_tile = !at_tile;
        want = want == forced ? spare : forced;
      }
      if (++steps > limit) {
        throw Error(ErrorCode::RepairBudgetExhausted, "repair exceeded " + std::to_string(limit) + " steps", {limit});
      }

      // Swap the two banks along the chain, then place the forced bank.
      for (std::size_t datum : chain) holders.set(col_of[datum], tile_of[datum], *partial[datum], holders.kNone);
      for (std::size_t datum : chain) {
        const Bank flipped = *partial[datum] == forced ? spare : forced;
        partial[datum] = flipped;
        holders.set(col_of[datum], tile_of[datum], flipped, datum);
      }
      partial[d] = forced;
      holders.set(col, tile, forced, d);
    }
  }
  return BankMapping::from_partial(banks, partial);
}

struct BaselineOutcome {
  BankMapping mapping;
  std::size_t greedy_empty_cells = 0;
};

inline BaselineOutcome baseline_solve(const SchedulePair& schedules, std::uint64_t seed) {
  const TileMatrix tiles = build_tiles(schedules);
  PartialMapping partial = greedy_fill(tiles);
  std::size_t empty = 0;
  for (const auto& b : partial) empty += b ? 0 : 1;
  return BaselineOutcome{repair_complete(std::move(partial), tiles, seed), empty};
}

}  // namespace sage

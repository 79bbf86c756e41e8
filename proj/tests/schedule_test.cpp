#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sage/schedule.hpp"
#include "support/instances.hpp"

namespace sage {
namespace {

using testing::kWorkedPermutation;

std::vector<std::vector<std::size_t>> rows_of(const AccessSchedule& s) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t p = 0; p < s.rows(); ++p) out.push_back(s.row(p));
  return out;
}

TEST(Permutation, AcceptsWorkedLaw) {
  const Permutation p = Permutation::from_entries(kWorkedPermutation);
  EXPECT_EQ(p.size(), 12u);
  EXPECT_EQ(p[0], 1u);
  EXPECT_EQ(p[11], 4u);
}

TEST(Permutation, AcceptsIdentity) { EXPECT_EQ(Permutation::from_entries({0, 1, 2, 3}).size(), 4u); }

TEST(Permutation, RejectsDuplicate) {
  try {
    Permutation::from_entries({0, 0, 2});
    FAIL() << "expected DuplicateEntry";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateEntry);
    EXPECT_EQ(e.details(), std::vector<std::size_t>{0});
  }
}

TEST(Permutation, RejectsOutOfRangeAndEmpty) {
  try {
    Permutation::from_entries({0, 3, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    EXPECT_EQ(e.details(), std::vector<std::size_t>{3});
  }
  try {
    Permutation::from_entries({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(ProblemSpec, RejectsNonDivisor) {
  try {
    ProblemSpec::make(Permutation::from_entries(kWorkedPermutation), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonDivisorParallelism);
    EXPECT_EQ(e.details(), (std::vector<std::size_t>{5, 12}));
  }
  EXPECT_THROW(ProblemSpec::make(Permutation::identity(4), 0), Error);
}

TEST(BuildSchedules, ReproducesReferenceMatrices) {
  const SchedulePair s = build_schedules(testing::worked_spec());
  using Rows = std::vector<std::vector<std::size_t>>;
  EXPECT_EQ(rows_of(s.natural), (Rows{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}}));
  EXPECT_EQ(rows_of(s.interleaved), (Rows{{1, 5, 2, 6}, {9, 0, 7, 8}, {10, 11, 3, 4}}));
  EXPECT_EQ(s.natural.order(), AccessOrder::Natural);
  EXPECT_EQ(s.interleaved.order(), AccessOrder::Interleaved);
}

TEST(BuildSchedules, SingleRowDegeneratesToSequentialAccess) {
  const SchedulePair s = build_schedules(testing::identity_spec(3, 1));
  EXPECT_EQ(s.natural.row(0), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(s.interleaved.row(0), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BuildSchedules, ConventionsAreOverridable) {
  const LayoutConventions swapped{FillOrder::ColumnMajorSequence, FillOrder::RowMajorBlocks};
  const SchedulePair s = build_schedules(ProblemSpec::make(Permutation::from_entries(kWorkedPermutation), 3, swapped));
  EXPECT_EQ(s.natural.row(0), (std::vector<std::size_t>{0, 3, 6, 9}));
  EXPECT_EQ(s.interleaved.row(0), (std::vector<std::size_t>{1, 9, 10, 5}));
}

TEST(AccessSchedule, RejectsNonPartition) {
  EXPECT_THROW(AccessSchedule(AccessOrder::Natural, 2, 2, {0, 1, 1, 3}), Error);
  EXPECT_THROW(AccessSchedule(AccessOrder::Natural, 2, 2, {0, 1, 2}), Error);
}

TEST(BuildSchedules, CompletenessAndColumnMajorRoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto conventions = testing::random_conventions(rng);
    const ProblemSpec spec = testing::random_spec(rng, {1, 2, 3, 4, 6}, 48, conventions);
    const SchedulePair s = build_schedules(spec);
    for (const AccessSchedule* sched : {&s.natural, &s.interleaved}) {
      std::multiset<std::size_t> cells;
      for (std::size_t p = 0; p < sched->rows(); ++p) {
        for (std::size_t t = 0; t < sched->cols(); ++t) {
          cells.insert(sched->at(p, t));
          EXPECT_EQ(sched->position_of(sched->at(p, t)), (CellPos{p, t}));
        }
      }
      std::multiset<std::size_t> expected;
      for (std::size_t d = 0; d < spec.length(); ++d) expected.insert(d);
      EXPECT_EQ(cells, expected);
    }
    if (conventions.interleaved_fill == FillOrder::ColumnMajorSequence) {
      std::vector<std::size_t> read;
      for (std::size_t t = 0; t < s.interleaved.cols(); ++t) {
        for (std::size_t p = 0; p < s.interleaved.rows(); ++p) read.push_back(s.interleaved.at(p, t));
      }
      EXPECT_TRUE(std::equal(read.begin(), read.end(), spec.permutation().entries().begin()));
    }
  }
}

}  // namespace
}  // namespace sage

#include <gtest/gtest.h>

#include "support/properties.hpp"

namespace sage {
namespace {

void expect_ok(const testing::PropertyResult& r, std::size_t min_trials) {
  EXPECT_GE(r.trials, min_trials);
  EXPECT_TRUE(r.ok()) << r.failures << " failures, first: " << r.first_failure;
}

TEST(Property, RotationRelabelingCommutes) { expect_ok(testing::check_rotation_relabeling(2000, 1), 2000); }

TEST(Property, UndoIsExact) { expect_ok(testing::check_exact_undo(1500, 2), 1500); }

TEST(Property, BanksAreBalanced) { expect_ok(testing::check_bank_balance(1000, 3), 1000); }

TEST(Property, VerifiersAgree) { expect_ok(testing::check_dual_verifier(2000, 4), 2000); }

TEST(Property, StrictBarrelMatchesOracle) { expect_ok(testing::check_oracle_equivalence(150, 5), 151); }

TEST(Property, CrossbarAlwaysSolves) { expect_ok(testing::check_unconstrained_existence(300, 6), 300); }

TEST(Property, SolverIsDeterministic) {
  std::mt19937_64 rng(7);
  SolveOptions options;
  options.relax_on_objective_failure = true;
  options.trace = true;
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemSpec spec = testing::random_spec(rng, {2, 3, 4}, 48);
    const SolveOutcome a = memmap_solve(spec, NetworkObjective::barrel_shifter(), options);
    const SolveOutcome b = memmap_solve(spec, NetworkObjective::barrel_shifter(), options);
    EXPECT_EQ(a.mapping, b.mapping);
    EXPECT_EQ(a.stats, b.stats);
    EXPECT_EQ(a.trace, b.trace);
  }
}

TEST(Property, ValidMappingsAreCrossbarCompatible) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const ProblemSpec spec = testing::random_spec(rng, {2, 3, 4, 8}, 64, testing::random_conventions(rng));
    const SchedulePair s = build_schedules(spec);
    const BankMapping m = baseline_solve(s, trial).mapping;
    ASSERT_TRUE(verify_mapping(m, s).valid);
    EXPECT_TRUE(objective_compatible(m, s, NetworkObjective::crossbar()));
  }
}

TEST(Property, ControlsReplayTheVerifiedBanks) {
  std::mt19937_64 rng(9);
  SolveOptions options;
  options.relax_on_objective_failure = true;
  std::size_t replayed = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const ProblemSpec spec = testing::random_spec(rng, {2, 3, 4}, 48, testing::random_conventions(rng));
    const SchedulePair s = build_schedules(spec);
    const NetworkObjective obj = trial % 2 ? NetworkObjective::crossbar() : NetworkObjective::barrel_shifter();
    const SolveOutcome out = memmap_solve(spec, obj, options);
    if (!out.objective_met) continue;
    const ControlSchedule ctl = derive_controls(*out.mapping, s, obj);
    EXPECT_NO_THROW(simulate(*out.mapping, s, &ctl));
    ++replayed;
  }
  EXPECT_GT(replayed, 150u);
}

TEST(Property, BarrelCompatibilityIgnoresRelabeling) {
  std::mt19937_64 rng(10);
  SolveOptions options;
  options.relax_on_objective_failure = true;
  for (int trial = 0; trial < 300; ++trial) {
    const ProblemSpec spec = testing::random_spec(rng, {2, 3, 4}, 36);
    const SchedulePair s = build_schedules(spec);
    const BankMapping m = trial % 2 ? baseline_solve(s, trial).mapping
                                    : *memmap_solve(spec, NetworkObjective::barrel_shifter(), options).mapping;
    std::vector<Bank> sigma(spec.parallelism());
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = bank(i);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const BankMapping r = m.relabeled(sigma);
    EXPECT_TRUE(equal_up_to_relabeling(m, r));
    EXPECT_EQ(objective_compatible(m, s, NetworkObjective::barrel_shifter()),
              objective_compatible(r, s, NetworkObjective::barrel_shifter()));
  }
}

}  // namespace
}  // namespace sage

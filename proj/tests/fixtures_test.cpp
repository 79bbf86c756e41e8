#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sage/io.hpp"
#include "sage/sage.hpp"

namespace sage {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

TEST(Fixtures, OracleCountsArePinned) {
  const json pinned = load(fs::path(SAGE_FIXTURES_DIR) / "oracle_counts.json");
  std::size_t checked = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(SAGE_FIXTURES_DIR) / "problems")) {
    const io::ProblemFile problem = io::parse_problem(load(entry.path()));
    const SchedulePair s = build_schedules(problem.spec);
    for (bool fixed : {true, false}) {
      SCOPED_TRACE(entry.path().filename().string() + (fixed ? " fixed" : " free"));
      const std::string key = io::instance_key(problem.spec, problem.objective, fixed);
      ASSERT_TRUE(pinned.contains(key)) << "run tools/regen_fixtures.sh";
      const json& want = pinned.at(key);
      const auto solutions = brute_force_solve(s, problem.objective, fixed);
      EXPECT_EQ(solutions.size(), want.at("solution_count").get<std::size_t>());
      if (solutions.empty()) {
        EXPECT_TRUE(want.at("sample_solution").is_null());
      } else {
        EXPECT_EQ(solutions.front(), io::parse_mapping(want.at("sample_solution"), problem.spec.length()));
      }
      ++checked;
    }
  }
  EXPECT_EQ(checked, pinned.size());
}

TEST(Fixtures, StrictSolverMatchesPinnedFeasibility) {
  const json pinned = load(fs::path(SAGE_FIXTURES_DIR) / "oracle_counts.json");
  for (const auto& entry : fs::directory_iterator(fs::path(SAGE_FIXTURES_DIR) / "problems")) {
    const io::ProblemFile problem = io::parse_problem(load(entry.path()));
    const json& want = pinned.at(io::instance_key(problem.spec, problem.objective, true));
    const SolveOutcome out = memmap_solve(problem.spec, problem.objective);
    EXPECT_EQ(out.status == SolveStatus::Solved, want.at("solution_count").get<std::size_t>() > 0)
        << entry.path().filename();
  }
}

}  // namespace
}  // namespace sage

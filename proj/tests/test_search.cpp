#include <filesystem>
#include <random>

#include "doctest.h"

#include "cubetutor/cubelets.hpp"
#include "cubetutor/search.hpp"
#include "cubetutor/value_table.hpp"

using namespace cubetutor;

namespace {

// Direct enumeration of cubelets with any mismatching constrained facelet.
int count_misplaced(const CubeState& s, const PartialGoal& g) {
  int k = 0;
  for (int p = 0; p < kNumCubelets; ++p) {
    bool bad = false;
    for (int f = 0; f < kNumFacelets; ++f)
      if (!is_center(f) && position_of_facelet(f) == p && g.at(f) && *g.at(f) != s[f]) bad = true;
    k += bad;
  }
  return k;
}

CubeState random_short_scramble(std::uint64_t seed, int max_depth) {
  std::mt19937_64 rng(seed);
  const int depth = std::uniform_int_distribution<int>(1, max_depth)(rng);
  return scramble(depth, seed).first;
}

FocusedEffect cross_effect(int target, const CubeState& s) {
  FocusedEffect e{target, {}, describe_effect(target)};
  for (int c = 0; c < 4; ++c)
    if (c != target && is_placed(s, c)) e.protected_cubelets.push_back(c);
  return e;
}

const CubeState& worked_state() {
  static const CubeState s = apply_sequence(solved_state(), parse_moves("F' R' F D"));
  return s;
}

}  // namespace

TEST_CASE("misplaced bound") {
  const PartialGoal solved = PartialGoal::solved();
  CHECK(misplaced_bound_heuristic(solved_state(), solved) == 0);
  const CubeState r = apply_move(solved_state(), {Face::R, true});
  CHECK(count_misplaced(r, solved) == 8);
  CHECK(misplaced_bound_heuristic(r, solved) == 1);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CubeState s = random_short_scramble(seed, 5);
    const auto d = bfs_oracle(s, solved, 5);
    REQUIRE(d.has_value());
    CHECK(misplaced_bound_heuristic(s, solved) == (count_misplaced(s, solved) + 7) / 8);
    CHECK(misplaced_bound_heuristic(s, solved) <= *d);
  }
}

TEST_CASE("breadth-first oracle") {
  const PartialGoal solved = PartialGoal::solved();
  CHECK(*bfs_oracle(solved_state(), solved, 0) == 0);
  CHECK(*bfs_oracle(apply_move(solved_state(), {Face::F, false}), solved, 1) == 1);
  CHECK_FALSE(bfs_oracle(apply_sequence(solved_state(), parse_moves("R U")), solved, 1).has_value());
  CHECK_THROWS_AS(bfs_oracle(solved_state(), solved, 8), std::invalid_argument);
  const FocusedEffect e = cross_effect(0, worked_state());
  CHECK(e.protected_cubelets == std::vector<int>{1, 2, 3});
  CHECK(*bfs_oracle(worked_state(), focused_goal(e), 4) == 4);
}

TEST_CASE("A* with the admissible bound is optimal") {
  const PartialGoal solved = PartialGoal::solved();
  const MisplacedBound h;
  const auto trivial = astar_solve(solved_state(), solved, h);
  CHECK(trivial.solved());
  CHECK(trivial.result.path.empty());
  const CubeState ru = apply_sequence(solved_state(), parse_moves("R U"));
  CHECK(astar_solve(ru, solved, h).result.cost() == 2);
  for (std::uint64_t seed = 1000; seed < 1030; ++seed) {
    const CubeState s = random_short_scramble(seed, 5);
    const auto out = astar_solve(s, solved, h);
    REQUIRE(out.solved());
    CHECK(matches(apply_sequence(s, out.result.path), solved));
    CHECK(out.result.cost() == *bfs_oracle(s, solved, 5));
  }
  CHECK_THROWS_AS(astar_solve(ru, solved, h, 0.5), std::invalid_argument);
}

TEST_CASE("node budget") {
  const PartialGoal solved = PartialGoal::solved();
  const MisplacedBound h;
  const CubeState s = scramble(6, 17).first;
  const auto starved = astar_solve(s, solved, h, 1.0, 10);
  CHECK(starved.status == SearchStatus::BudgetExhausted);
  CHECK(starved.result.nodes_expanded <= 10);
  bool seen_success = false;
  for (std::size_t budget : {10u, 100u, 1000u, 10000u, 100000u}) {
    const auto out = astar_solve(s, solved, h, 1.0, budget);
    if (seen_success) CHECK(out.solved());
    seen_success = seen_success || out.solved();
    CHECK(out.result.nodes_expanded <= budget);
  }
  CHECK(seen_success);
}

TEST_CASE("weighted search still reaches the goal") {
  const PartialGoal cross = PartialGoal::white_cross();
  const MisplacedBound h;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CubeState s = scramble(6, seed).first;
    const auto out = astar_solve(s, cross, h, 2.0);
    REQUIRE(out.solved());
    CHECK(matches(apply_sequence(s, out.result.path), cross));
  }
}

TEST_CASE("focused solving") {
  const MisplacedBound h;
  FocusedEffect placed{1, {0}, describe_effect(1)};
  CHECK(solve_focused(solved_state(), placed, h).result.path.empty());
  const FocusedEffect e = cross_effect(0, worked_state());
  CHECK(e.description == "White-orange cubelet is aligned.");
  const auto out = solve_focused(worked_state(), e, h);
  REQUIRE(out.solved());
  CHECK(out.result.cost() <= 4);
  const CubeState after = apply_sequence(worked_state(), out.result.path);
  for (int c = 0; c < 4; ++c) CHECK(is_placed(after, c));
  CHECK_THROWS_AS(solve_focused(apply_move(solved_state(), {Face::U, true}), placed, h), std::invalid_argument);
}

TEST_CASE("value table training") {
  const FocusedEffect e{0, {1}, ""};
  const PartialGoal goal = focused_goal(e);
  const ValueTable t = train_value_table(goal, 4000, 8, 40, 5);
  CHECK(t.cubelets() == std::vector<int>{0, 1});
  CHECK(*t.lookup(t.pattern(solved_state())) == 0.0);
  for (int m = 0; m < kNumMoves; ++m) {
    const CubeState s = apply_move(solved_state(), Move::from_index(m));
    if (matches(s, goal)) continue;
    const auto v = t.lookup(t.pattern(s));
    REQUIRE(v.has_value());
    CHECK(*v >= 0.99);
    CHECK(*v <= 1.0);
  }
  CHECK(t.info().bellman_residual >= 0.0);
  CHECK(t.info().iterations_run <= 40);

  const ValueTable again = train_value_table(goal, 4000, 8, 40, 5);
  CHECK(again.size() == t.size());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CubeState s = scramble(10, seed).first;
    CHECK(t.estimate(s, goal) == again.estimate(s, goal));
  }

  // admissible against the oracle
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const CubeState s = random_short_scramble(seed + 500, 5);
    const auto d = bfs_oracle(s, goal, 5);
    REQUIRE(d.has_value());
    CHECK(t.estimate(s, goal) <= *d + 1e-12);
    CHECK(t.estimate(s, goal) >= 0.0);
  }

  // other goals fall back to the bound
  const CubeState r = apply_move(solved_state(), {Face::R, true});
  CHECK(t.estimate(r, PartialGoal::solved()) == 1.0);

  const auto path = std::filesystem::temp_directory_path() / "cubetutor_value_table_test.json";
  t.save(path);
  const ValueTable loaded = ValueTable::load(path);
  CHECK(loaded.size() == t.size());
  CHECK(loaded.info().seed == 5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CubeState s = scramble(10, seed).first;
    CHECK(loaded.estimate(s, goal) == t.estimate(s, goal));
  }
  std::filesystem::remove(path);
}

TEST_CASE("value tables need cubelet goals") {
  CHECK(ValueTable(PartialGoal::white_cross()).cubelets() == std::vector<int>{0, 1, 2, 3});
  PartialGoal half;
  half.fix(facelet_index(Face::U, 5), Color::White);
  CHECK_THROWS_AS(ValueTable{half}, std::invalid_argument);
  PartialGoal g;
  g.fix(facelet_index(Face::U, 4), Color::Yellow);
  CHECK_THROWS_AS(ValueTable{g}, std::invalid_argument);
  CHECK_THROWS_AS(train_value_table(focused_goal({0, {}, ""}), 0, 5, 5, 1), std::invalid_argument);
}

TEST_CASE("learned heuristic keeps search optimal on the cross") {
  HeuristicCache cache({20000, 9, 30, 3});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CubeState s = scramble(5, seed + 77).first;
    const FocusedEffect e{0, {}, ""};
    const auto& table = cache.for_effect(e);
    const PartialGoal goal = focused_goal(e);
    const auto out = astar_solve(s, goal, table);
    REQUIRE(out.solved());
    CHECK(out.result.cost() == *bfs_oracle(s, goal, 5));
  }
  CHECK(cache.size() == 1);
}

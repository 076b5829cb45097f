#pragma once

// Goal-conditioned A* over quarter turns, plus a breadth-first oracle.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cubetutor/cube.hpp"

namespace cubetutor {

class HeuristicProvider {
 public:
  virtual ~HeuristicProvider() = default;
  /// Estimated moves to reach the goal; 0 whenever the goal is satisfied.
  virtual double estimate(const CubeState& state, const PartialGoal& goal) const = 0;
  virtual bool admissible() const = 0;
};

/// ceil(k / 8), k = goal-constrained non-center cubelets with a mismatching
/// facelet. A quarter turn moves exactly 8 non-center cubelets.
int misplaced_bound_heuristic(const CubeState& state, const PartialGoal& goal);

class MisplacedBound final : public HeuristicProvider {
 public:
  double estimate(const CubeState& state, const PartialGoal& goal) const override {
    return misplaced_bound_heuristic(state, goal);
  }
  bool admissible() const override { return true; }
};

struct SearchResult {
  MoveSequence path;
  std::size_t nodes_expanded = 0;
  int cost() const { return static_cast<int>(path.size()); }
};

enum class SearchStatus { Solved, BudgetExhausted };

struct SearchOutcome {
  SearchStatus status = SearchStatus::BudgetExhausted;
  SearchResult result;  // path is empty unless solved

  bool solved() const { return status == SearchStatus::Solved; }
};

inline constexpr std::size_t kDefaultNodeBudget = 2'000'000;

/// Weighted A* (f = g + weight * h). Equal f breaks toward larger g, then
/// toward earlier generation (move enumeration order). Throws
/// std::invalid_argument when weight < 1.
SearchOutcome astar_solve(const CubeState& start, const PartialGoal& goal, const HeuristicProvider& h,
                          double weight = 1.0, std::size_t node_budget = kDefaultNodeBudget);

inline constexpr int kMaxOracleDepth = 7;

/// Exact distance by breadth-first enumeration; nullopt if it exceeds
/// max_depth. Throws std::invalid_argument when max_depth > 7.
std::optional<int> bfs_oracle(const CubeState& start, const PartialGoal& goal, int max_depth);

/// Place one cubelet without disturbing a set of others.
struct FocusedEffect {
  int target = 0;
  std::vector<int> protected_cubelets;  // sorted, never contains target
  std::string description;
};

/// Target and protected cubelets at home, centers fixed, everything else free.
PartialGoal focused_goal(const FocusedEffect& effect);
/// "White-orange cubelet is aligned."
std::string describe_effect(int target);

/// Throws std::invalid_argument if a protected cubelet is not in place.
SearchOutcome solve_focused(const CubeState& state, const FocusedEffect& effect, const HeuristicProvider& h,
                            std::size_t node_budget = kDefaultNodeBudget, double weight = 1.0);

}  // namespace cubetutor

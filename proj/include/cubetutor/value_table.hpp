#pragma once

// Learned cost-to-go over goal-relevant cubelet patterns.
//
// A pattern records where each goal-relevant cubelet sits and how it is
// oriented (as the facelet holding its reference sticker). Training samples
// reverse-scramble walks from the goal, then runs value iteration on the
// sampled pattern graph. Values start at the misplaced-cubelet bound, goal
// patterns are pinned to 0 and unseen successors use the bound, so every
// stored value stays admissible.

#include <absl/container/flat_hash_map.h>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "cubetutor/search.hpp"

namespace cubetutor {

struct PatternKey {
  std::uint64_t lo = 0, hi = 0;
  friend bool operator==(const PatternKey&, const PatternKey&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const PatternKey& k) {
    return H::combine(std::move(h), k.lo, k.hi);
  }
};

struct TrainingInfo {
  std::size_t samples = 0;
  int max_depth = 0;
  int iterations = 0;       // requested
  int iterations_run = 0;   // stopped early once the residual reached 0
  std::uint64_t seed = 0;
  double bellman_residual = 0.0;
};

class ValueTable final : public HeuristicProvider {
 public:
  /// Throws std::invalid_argument unless every constrained non-center
  /// position is fully fixed to its home colors and centers are home.
  explicit ValueTable(const PartialGoal& goal);

  const PartialGoal& goal() const { return goal_; }
  const std::vector<int>& cubelets() const { return cubelets_; }
  const TrainingInfo& info() const { return info_; }
  std::size_t size() const { return values_.size(); }

  PatternKey pattern(const CubeState& state) const;
  std::optional<double> lookup(const PatternKey& key) const;

  /// Table value for the goal it was trained on; misplaced bound otherwise
  /// or for unseen patterns.
  double estimate(const CubeState& state, const PartialGoal& goal) const override;
  bool admissible() const override { return true; }

  /// Max |v(p) - min_m (1 + v(succ(p, m)))| over non-goal stored patterns.
  double bellman_residual() const;

  void save(const std::filesystem::path& path) const;
  /// Throws std::runtime_error on malformed or version-mismatched files.
  static ValueTable load(const std::filesystem::path& path);

  friend ValueTable train_value_table(const PartialGoal& goal, std::size_t samples, int max_depth, int iterations,
                                      std::uint64_t seed);

 private:
  PatternKey successor(const PatternKey& key, Move m) const;
  double bound(const PatternKey& key) const;
  double backup(std::size_t index) const;

  PartialGoal goal_;
  std::vector<int> cubelets_;
  std::vector<PatternKey> keys_;
  std::vector<double> values_;
  absl::flat_hash_map<PatternKey, std::uint32_t> index_;
  TrainingInfo info_;
};

/// Throws std::invalid_argument when samples == 0 or max_depth < 1.
ValueTable train_value_table(const PartialGoal& goal, std::size_t samples, int max_depth, int iterations,
                             std::uint64_t seed);

struct TableParams {
  std::size_t samples = 60000;
  int max_depth = 9;
  int iterations = 30;
  std::uint64_t seed = 1;
};

/// Lazily trained tables for focused effects, keyed by the set of cubelets
/// involved. Thread-safe; tables are immutable once built.
class HeuristicCache {
 public:
  explicit HeuristicCache(TableParams params = {}) : params_(params) {}
  const ValueTable& for_effect(const FocusedEffect& effect);
  std::size_t size() const;

 private:
  TableParams params_;
  mutable std::mutex mutex_;
  std::map<std::vector<int>, std::unique_ptr<ValueTable>> tables_;
};

}  // namespace cubetutor

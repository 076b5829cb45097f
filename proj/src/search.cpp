#include "cubetutor/search.hpp"

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <queue>
#include <stdexcept>

#include "cubetutor/cubelets.hpp"

namespace cubetutor {

namespace {

struct PackedState {
  std::array<std::uint64_t, 3> words{};
  friend bool operator==(const PackedState&, const PackedState&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const PackedState& p) {
    return H::combine(std::move(h), p.words[0], p.words[1], p.words[2]);
  }
};

PackedState pack(const CubeState& s) {
  PackedState p;
  for (int i = 0; i < kNumFacelets; ++i)
    p.words[static_cast<std::size_t>(i / 21)] |= static_cast<std::uint64_t>(s[i]) << (3 * (i % 21));
  return p;
}

struct Node {
  CubeState state;
  int parent;
  std::int8_t move;
  int g;
};

struct Entry {
  double f;
  int g;
  std::uint64_t order;
  int node;
};

struct EntryWorse {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.order > b.order;
  }
};

}  // namespace

int misplaced_bound_heuristic(const CubeState& state, const PartialGoal& goal) {
  int k = 0;
  for (int p = 0; p < kNumCubelets; ++p) {
    for (auto f : position_facelets(p)) {
      const auto want = goal.at(f);
      if (want && state[f] != *want) {
        ++k;
        break;
      }
    }
  }
  return (k + 7) / 8;
}

SearchOutcome astar_solve(const CubeState& start, const PartialGoal& goal, const HeuristicProvider& h, double weight,
                          std::size_t node_budget) {
  if (!(weight >= 1.0)) throw std::invalid_argument("search weight must be at least 1");
  std::vector<Node> nodes;
  absl::flat_hash_map<PackedState, int> best_g;
  std::priority_queue<Entry, std::vector<Entry>, EntryWorse> open;
  std::uint64_t order = 0;

  nodes.push_back({start, -1, -1, 0});
  best_g[pack(start)] = 0;
  open.push({weight * h.estimate(start, goal), 0, order++, 0});

  SearchOutcome out;
  std::size_t expanded = 0;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const Node node = nodes[static_cast<std::size_t>(e.node)];
    if (node.g > best_g[pack(node.state)]) continue;
    if (matches(node.state, goal)) {
      MoveSequence path;
      for (int i = e.node; nodes[static_cast<std::size_t>(i)].parent >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
        path.push_back(Move::from_index(nodes[static_cast<std::size_t>(i)].move));
      std::reverse(path.begin(), path.end());
      out.status = SearchStatus::Solved;
      out.result = {std::move(path), expanded};
      return out;
    }
    if (expanded >= node_budget) break;
    ++expanded;
    for (int m = 0; m < kNumMoves; ++m) {
      const Move mv = Move::from_index(m);
      if (node.move >= 0 && inverse(Move::from_index(node.move)) == mv) continue;
      CubeState child = apply_move(node.state, mv);
      const int g = node.g + 1;
      auto [it, inserted] = best_g.try_emplace(pack(child), g);
      if (!inserted) {
        if (it->second <= g) continue;
        it->second = g;
      }
      const double f = g + weight * h.estimate(child, goal);
      nodes.push_back({std::move(child), e.node, static_cast<std::int8_t>(m), g});
      open.push({f, g, order++, static_cast<int>(nodes.size() - 1)});
    }
  }
  out.status = SearchStatus::BudgetExhausted;
  out.result.nodes_expanded = expanded;
  return out;
}

std::optional<int> bfs_oracle(const CubeState& start, const PartialGoal& goal, int max_depth) {
  if (max_depth > kMaxOracleDepth || max_depth < 0)
    throw std::invalid_argument("breadth-first oracle depth must be within [0, 7]");
  if (matches(start, goal)) return 0;
  absl::flat_hash_set<PackedState> visited;
  visited.insert(pack(start));
  std::vector<CubeState> frontier{start}, next;
  for (int depth = 1; depth <= max_depth; ++depth) {
    next.clear();
    for (const CubeState& s : frontier) {
      for (int m = 0; m < kNumMoves; ++m) {
        CubeState child = apply_move(s, Move::from_index(m));
        if (!visited.insert(pack(child)).second) continue;
        if (matches(child, goal)) return depth;
        next.push_back(std::move(child));
      }
    }
    frontier.swap(next);
  }
  return std::nullopt;
}

PartialGoal focused_goal(const FocusedEffect& effect) {
  PartialGoal g;
  for (int f = 0; f < kNumFaces; ++f)
    g.fix(facelet_index(static_cast<Face>(f), kCenterSlot), home_color(static_cast<Face>(f)));
  auto fix_cubelet = [&](int c) {
    const auto facelets = position_facelets(c);
    const auto colors = cubelet_colors(c);
    for (std::size_t i = 0; i < facelets.size(); ++i) g.fix(facelets[i], colors[i]);
  };
  fix_cubelet(effect.target);
  for (int c : effect.protected_cubelets) fix_cubelet(c);
  return g;
}

std::string describe_effect(int target) {
  std::string s;
  for (Color c : cubelet_colors(target)) {
    if (!s.empty()) s += '-';
    s += color_name(c);
  }
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s + " cubelet is aligned.";
}

SearchOutcome solve_focused(const CubeState& state, const FocusedEffect& effect, const HeuristicProvider& h,
                            std::size_t node_budget, double weight) {
  for (int c : effect.protected_cubelets)
    if (!is_placed(state, c))
      throw std::invalid_argument("protected cubelet " + cubelet_code(c) + " is not in place");
  return astar_solve(state, focused_goal(effect), h, weight, node_budget);
}

}  // namespace cubetutor

#include "cubetutor/macros.hpp"

#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "cubetutor/cubelets.hpp"
#include "json.hpp"

namespace cubetutor {

namespace {

constexpr std::string_view kLibraryFormat = "cubetutor-macro-library";
constexpr int kLibraryVersion = 1;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

int canonical_frame(int target, std::span<const int> frames) {
  int best = 0, best_pos = kNumCubelets;
  for (int k : frames) {
    const int p = transform_position(target, k);
    if (p < best_pos) {
      best_pos = p;
      best = k;
    }
  }
  return best;
}

using CandidateKey = std::tuple<std::string, int, int, int>;

CandidateKey key_of(const MacroCandidate& c) {
  return {format_moves(c.sequence), c.effect.target, c.source_position, c.source_orientation};
}

std::vector<int> placed_goal_cubelets(const CubeState& s, std::span<const int> goal_cubelets) {
  std::vector<int> out;
  for (int c : goal_cubelets)
    if (is_placed(s, c)) out.push_back(c);
  return out;
}

// Structured sample: target fixed at the source, other goal cubelets placed
// with probability one half.
CubeState structured_state(std::mt19937_64& rng, int target, int position, int orientation,
                           std::span<const int> goal_cubelets) {
  std::vector<CubeletPlacement> fixed{{target, position, orientation}};
  std::bernoulli_distribution coin(0.5);
  for (int c : goal_cubelets) {
    if (c == target || c == position) continue;
    if (coin(rng)) fixed.push_back({c, c, 0});
  }
  return random_state(rng, fixed);
}

// Candidates per config, unmerged, in target order.
std::vector<std::vector<MacroCandidate>> discover_per_config(std::span<const CubeState> configs,
                                                             const PartialGoal& goal, HeuristicCache& heuristics,
                                                             const DiscoveryParams& params, DiscoveryStats* stats,
                                                             bool parallel) {
  const std::vector<int> gc = goal_cubelets(goal);
  struct Task {
    std::size_t config;
    FocusedEffect effect;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (matches(configs[i], goal)) continue;
    const std::vector<int> placed = placed_goal_cubelets(configs[i], gc);
    for (int target : gc) {
      if (std::find(placed.begin(), placed.end(), target) != placed.end()) continue;
      tasks.push_back({i, {target, placed, describe_effect(target)}});
    }
  }
  // Tables are trained up front so the parallel region only reads them.
  std::vector<const ValueTable*> tables(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) tables[t] = &heuristics.for_effect(tasks[t].effect);

  std::vector<std::optional<MacroCandidate>> found(tasks.size());
  const auto n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t t = 0; t < n; ++t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    const auto out = solve_focused(configs[task.config], task.effect, *tables[static_cast<std::size_t>(t)],
                                   params.node_budget, params.weight);
    if (out.solved())
      found[static_cast<std::size_t>(t)] = make_candidate(configs[task.config], out.result.path, task.effect, goal);
  }
  std::vector<std::vector<MacroCandidate>> per_config(configs.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (stats) ++stats->searches;
    if (found[t])
      per_config[tasks[t].config].push_back(std::move(*found[t]));
    else if (stats)
      ++stats->failures;
  }
  return per_config;
}

std::vector<MacroCandidate> merge_candidates(const std::vector<const std::vector<MacroCandidate>*>& groups) {
  std::map<CandidateKey, MacroCandidate> merged;
  for (const auto* group : groups)
    for (const auto& c : *group) {
      auto [it, inserted] = merged.try_emplace(key_of(c), c);
      if (!inserted) it->second.merged_sources += c.merged_sources;
    }
  std::vector<MacroCandidate> out;
  out.reserve(merged.size());
  for (auto& [k, c] : merged) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), candidate_less);
  return out;
}

std::vector<MacroCandidate> discover(std::span<const CubeState> configs, const PartialGoal& goal,
                                     HeuristicCache& heuristics, const DiscoveryParams& params, DiscoveryStats* stats,
                                     bool parallel) {
  const auto per_config = discover_per_config(configs, goal, heuristics, params, stats, parallel);
  std::vector<const std::vector<MacroCandidate>*> groups;
  for (const auto& g : per_config) groups.push_back(&g);
  return merge_candidates(groups);
}

struct ValidationRun {
  MacroValidation stats;
  std::vector<CubeState> counterexamples;
};

// Random state meeting the slot and placement atoms of a clause; the
// remaining atoms are left to rejection.
std::optional<CubeState> sample_for_clause(std::mt19937_64& rng, const Clause& clause, std::span<const int> goal_cubelets) {
  std::vector<CubeletPlacement> fixed;
  auto take = [&](int cubelet, int position, int orientation) {
    for (const auto& f : fixed)
      if (f.cubelet == cubelet || f.position == position)
        return f.cubelet == cubelet && f.position == position && f.orientation == orientation;
    fixed.push_back({cubelet, position, orientation});
    return true;
  };
  for (const auto& p : clause) {
    bool ok = true;
    if (p.kind == PredicateKind::EdgeSlot || p.kind == PredicateKind::CornerSlot) ok = take(p.b, p.a, p.c);
    if (p.kind == PredicateKind::Placed && !p.negated) ok = take(p.a, p.a, 0);
    if (!ok) return std::nullopt;
  }
  std::bernoulli_distribution coin(0.5);
  for (int c : goal_cubelets) {
    const bool mentioned = std::any_of(clause.begin(), clause.end(), [&](const Predicate& p) { return p.cubelet() == c; });
    const bool home_taken = std::any_of(fixed.begin(), fixed.end(), [&](const CubeletPlacement& f) {
      return f.cubelet == c || f.position == c;
    });
    if (!mentioned && !home_taken && coin(rng)) fixed.push_back({c, c, 0});
  }
  try {
    return random_state(rng, fixed);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

ValidationRun run_validation(const MacroAction& macro, const PartialGoal& goal, std::size_t count,
                             std::uint64_t seed) {
  ValidationRun run;
  const std::vector<int> gc = goal_cubelets(goal);
  std::mt19937_64 rng(seed);
  const int target = macro.effect.target;
  auto check = [&](const CubeState& s) {
    ++run.stats.states;
    const std::vector<int> before = placed_goal_cubelets(s, gc);
    const CubeState after = apply_sequence(s, macro.sequence);
    bool bad = false;
    if (!is_placed(after, target)) {
      ++run.stats.effect_failures;
      bad = true;
    }
    if (std::any_of(before.begin(), before.end(), [&](int c) { return !is_placed(after, c); })) {
      ++run.stats.protection_violations;
      bad = true;
    }
    if (bad) run.counterexamples.push_back(s);
  };
  // every clause gets its own precondition-satisfying sample
  for (const Clause& clause : macro.precondition.clauses) {
    std::size_t got = 0;
    for (std::size_t attempts = 0; got < count && attempts < count * 50; ++attempts) {
      const auto s = sample_for_clause(rng, clause, gc);
      if (!s) break;
      const auto view = locate(*s);
      if (!evaluate_clause(clause, *s, view)) continue;
      check(*s);
      ++got;
    }
  }
  // labeled accuracy on a fresh mix
  std::size_t correct = 0;
  const std::size_t labeled = count * 4;
  for (std::size_t i = 0; i < labeled; ++i) {
    CubeState s = i % 2 == 0 ? structured_state(rng, target, macro.source_position, macro.source_orientation, gc)
                             : random_state(rng);
    if (i % 4 == 2) s = apply_move(s, Move::from_index(std::uniform_int_distribution<int>(0, kNumMoves - 1)(rng)));
    const bool label = achieves_effect(s, macro.sequence, target, gc);
    correct += evaluate_program(macro.precondition, s) == label;
  }
  run.stats.held_out = labeled;
  run.stats.held_out_accuracy = labeled ? static_cast<double>(correct) / static_cast<double>(labeled) : 0.0;
  return run;
}

// Applies the first applicable macro until none applies or the goal holds.
CubeState apply_until_stuck(CubeState s, const MacroLibrary& library, std::span<const int> frames, int step_cap) {
  for (int step = 0; step < step_cap && !matches(s, library.goal); ++step) {
    bool applied = false;
    for (const auto& m : library.macros) {
      if (auto moves = macro_moves_for(s, m, frames)) {
        s = apply_sequence(s, *moves);
        applied = true;
        break;
      }
    }
    if (!applied) break;
  }
  return s;
}

nlohmann::json effect_json(const FocusedEffect& e) {
  std::vector<std::string> prot;
  for (int c : e.protected_cubelets) prot.push_back(cubelet_code(c));
  return {{"target", cubelet_code(e.target)}, {"protected", prot}, {"description", e.description}};
}

int cubelet_or_throw(const std::string& code) {
  const auto c = cubelet_from_code(code);
  if (!c) throw std::runtime_error("unknown cubelet code " + code);
  return *c;
}

}  // namespace

std::vector<CubeState> generate_configurations(std::size_t n, DepthRange depth, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one configuration");
  if (depth.min < 1 || depth.max < depth.min) throw std::invalid_argument("empty or invalid depth range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(depth.min, depth.max);
  std::vector<CubeState> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int d = pick(rng);
    out.push_back(scramble(d, rng()).first);
  }
  return out;
}

std::vector<int> goal_cubelets(const PartialGoal& goal) {
  std::vector<int> out;
  for (int p = 0; p < kNumCubelets; ++p) {
    const auto f = position_facelets(p);
    if (std::all_of(f.begin(), f.end(), [&](std::uint8_t i) { return goal.fixed(i); })) out.push_back(p);
  }
  return out;
}

PartialGoal transform_goal(const PartialGoal& goal, int frame) {
  PartialGoal out;
  for (int i = 0; i < kNumFacelets; ++i)
    if (auto c = goal.at(i)) out.fix(transform_facelet(i, frame), transform_color(*c, frame));
  return out;
}

std::vector<int> goal_frames(const PartialGoal& goal) {
  std::vector<int> out;
  for (int k = 0; k < kNumFrames; ++k)
    if (transform_goal(goal, k) == goal) out.push_back(k);
  return out;
}

MacroCandidate make_candidate(const CubeState& state, const MoveSequence& sequence, const FocusedEffect& effect,
                              const PartialGoal& goal) {
  const std::vector<int> frames = goal_frames(goal);
  const int k = canonical_frame(effect.target, frames);
  MacroCandidate c;
  c.source = transform_state(state, k);
  c.sequence = transform_moves(sequence, k);
  c.effect.target = transform_position(effect.target, k);
  for (int p : effect.protected_cubelets) c.effect.protected_cubelets.push_back(transform_position(p, k));
  std::sort(c.effect.protected_cubelets.begin(), c.effect.protected_cubelets.end());
  c.effect.description = describe_effect(c.effect.target);
  const CubieView v = locate(c.source);
  c.source_position = v.position_of[static_cast<std::size_t>(c.effect.target)];
  c.source_orientation = v.orient_of[static_cast<std::size_t>(c.effect.target)];
  c.complexity = static_cast<int>(c.sequence.size());
  return c;
}

std::vector<MacroCandidate> discover_candidates(std::span<const CubeState> configs, const PartialGoal& goal,
                                                HeuristicCache& heuristics, const DiscoveryParams& params,
                                                DiscoveryStats* stats) {
  return discover(configs, goal, heuristics, params, stats, true);
}

std::vector<MacroCandidate> discover_candidates_serial(std::span<const CubeState> configs, const PartialGoal& goal,
                                                       HeuristicCache& heuristics, const DiscoveryParams& params,
                                                       DiscoveryStats* stats) {
  return discover(configs, goal, heuristics, params, stats, false);
}

bool candidate_less(const MacroCandidate& a, const MacroCandidate& b) {
  if (a.complexity != b.complexity) return a.complexity < b.complexity;
  return key_of(a) < key_of(b);
}

const MacroCandidate& select_lowest_complexity(std::span<const MacroCandidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to select from");
  const MacroCandidate* best = &candidates[0];
  for (const auto& c : candidates)
    if (c.complexity < best->complexity ||
        (c.complexity == best->complexity && format_moves(c.sequence) < format_moves(best->sequence)))
      best = &c;
  return *best;
}

bool achieves_effect(const CubeState& state, const MoveSequence& sequence, int target,
                     std::span<const int> goal_cubelets) {
  const std::vector<int> before = placed_goal_cubelets(state, goal_cubelets);
  const CubeState after = apply_sequence(state, sequence);
  if (!is_placed(after, target)) return false;
  return std::all_of(before.begin(), before.end(), [&](int c) { return is_placed(after, c); });
}

ExampleSet generate_examples(const MacroCandidate& candidate, std::span<const CubeState> configs,
                             const PartialGoal& goal, const ExampleParams& params) {
  const std::vector<int> gc = goal_cubelets(goal);
  const std::vector<int> frames = goal_frames(goal);
  const int target = candidate.effect.target;
  std::mt19937_64 rng(fnv1a(format_moves(candidate.sequence),
                            params.seed * 1000003u + static_cast<std::uint64_t>(target * 64 + candidate.source_position * 3 +
                                                                                 candidate.source_orientation)));
  ExampleSet ex;
  absl::flat_hash_set<CubeState> seen;
  auto add = [&](const CubeState& s) {
    if (!seen.insert(s).second) return;
    (achieves_effect(s, candidate.sequence, target, gc) ? ex.positives : ex.negatives).push_back(s);
  };
  add(candidate.source);
  for (const auto& c : configs)
    for (int k : frames) add(transform_state(c, k));
  for (std::size_t i = 0; i < params.structured; ++i)
    add(structured_state(rng, target, candidate.source_position, candidate.source_orientation, gc));
  for (std::size_t i = 0; i < params.uniform; ++i) add(random_state(rng));
  std::uniform_int_distribution<int> move(0, kNumMoves - 1);
  const std::size_t base = ex.positives.size();
  for (std::size_t i = 0; i < params.near_misses && base > 0; ++i)
    add(apply_move(ex.positives[i % base], Move::from_index(move(rng))));
  if (ex.positives.size() < params.min_positives)
    throw InsufficientExamples("only " + std::to_string(ex.positives.size()) + " positive examples for " +
                               format_moves(candidate.sequence));
  return ex;
}

MacroValidation validate_macro(const MacroAction& macro, const PartialGoal& goal, std::size_t count,
                               std::uint64_t seed) {
  return run_validation(macro, goal, count, seed).stats;
}

std::optional<int> applicable_frame(const CubeState& state, const MacroAction& macro, std::span<const int> frames) {
  static const int kIdentity[] = {0};
  if (frames.empty()) frames = kIdentity;
  for (int k : frames)
    if (evaluate_program(macro.precondition, transform_state(state, k))) return k;
  return std::nullopt;
}

std::optional<MoveSequence> macro_moves_for(const CubeState& state, const MacroAction& macro,
                                            std::span<const int> frames) {
  const auto k = applicable_frame(state, macro, frames);
  if (!k) return std::nullopt;
  return transform_moves(macro.sequence, inverse_frame(*k));
}

CubeState apply_macro(const CubeState& state, const MacroAction& macro, std::span<const int> frames) {
  const auto moves = macro_moves_for(state, macro, frames);
  if (!moves) throw PreconditionUnsatisfied("precondition of " + macro.name + " does not hold");
  return apply_sequence(state, *moves);
}

GreedyResult greedy_solve_with_library(const CubeState& state, const MacroLibrary& library, int step_cap) {
  const std::vector<int> frames = goal_frames(library.goal);
  GreedyResult r;
  CubeState s = state;
  for (int step = 0;; ++step) {
    if (matches(s, library.goal)) {
      r.status = GreedyStatus::Solved;
      return r;
    }
    if (step >= step_cap) {
      r.status = GreedyStatus::StepCap;
      return r;
    }
    bool applied = false;
    for (std::size_t i = 0; i < library.macros.size() && !applied; ++i) {
      const auto k = applicable_frame(s, library.macros[i], frames);
      if (!k) continue;
      MoveSequence moves = transform_moves(library.macros[i].sequence, inverse_frame(*k));
      s = apply_sequence(s, moves);
      r.sequence.insert(r.sequence.end(), moves.begin(), moves.end());
      r.steps.push_back({i, *k, std::move(moves)});
      applied = true;
    }
    if (!applied) {
      r.status = GreedyStatus::NoApplicableMacro;
      return r;
    }
  }
}

std::optional<MacroAction> build_macro(const MacroCandidate& candidate, std::span<const CubeState> configs,
                                       const PartialGoal& goal, const LearnParams& params, std::string name,
                                       std::string* reason) {
  auto fail = [&](std::string why) -> std::optional<MacroAction> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };
  ExampleParams ep = params.examples;
  std::vector<CubeState> extra_negatives;
  std::optional<MacroAction> accepted;
  std::string last_failure;
  for (int round = 0; round < params.induction_rounds; ++round) {
    ExampleSet ex;
    try {
      ex = generate_examples(candidate, configs, goal, ep);
    } catch (const InsufficientExamples& e) {
      return fail(e.what());
    }
    const std::vector<int> gc = goal_cubelets(goal);
    for (const auto& s : extra_negatives)
      if (!achieves_effect(s, candidate.sequence, candidate.effect.target, gc)) ex.negatives.push_back(s);
    const InductionResult ir = induce_program(ex, params.induction);
    if (!ir.ok) {
      last_failure = "induction failed: " + ir.failure;
      ep.structured *= 2;
      ep.seed += 7919;
      continue;
    }
    MacroAction m;
    m.name = name;
    m.precondition = ir.program;
    m.sequence = candidate.sequence;
    m.effect = candidate.effect;
    m.complexity = candidate.complexity;
    m.source_position = candidate.source_position;
    m.source_orientation = candidate.source_orientation;
    m.positives = ex.positives.size();
    m.negatives = ex.negatives.size();
    ValidationRun v = run_validation(m, goal, params.validation_states, ep.seed ^ 0x5bd1e995u);
    m.validation = v.stats;
    if (m.validation.sound() && m.validation.held_out_accuracy >= params.held_out_threshold) return m;
    if (m.validation.sound()) accepted = m;
    last_failure = m.validation.sound() ? "held-out accuracy below threshold" : "unsound on held-out states";
    extra_negatives.insert(extra_negatives.end(), v.counterexamples.begin(), v.counterexamples.end());
    ep.structured *= 2;
    ep.uniform *= 2;
    ep.seed += 7919;
  }
  if (accepted) return accepted;
  return fail(last_failure);
}

LearnResult learn_macro_library(const PartialGoal& goal, std::string goal_name, const LearnParams& params,
                                HeuristicCache& heuristics) {
  return learn_from_configs(goal, std::move(goal_name),
                            generate_configurations(params.config_count, params.depth, params.seed), params, heuristics);
}

LearnResult learn_from_configs(const PartialGoal& goal, std::string goal_name, std::vector<CubeState> configs,
                               const LearnParams& params, HeuristicCache& heuristics) {
  if (configs.empty()) throw std::invalid_argument("need at least one configuration");
  LearnResult result;
  MacroLibrary& lib = result.library;
  lib.goal_name = std::move(goal_name);
  lib.goal = goal;
  lib.seed = params.seed;
  lib.config_count = configs.size();
  lib.depth = params.depth;
  const std::vector<int> frames = goal_frames(goal);
  constexpr int kFixpointSteps = 64;

  auto unsolved_configs = [&] {
    std::vector<CubeState> out;
    for (const auto& c : configs)
      if (!matches(c, goal)) out.push_back(c);
    return out;
  };

  std::map<CubeState, std::vector<MacroCandidate>> memo;
  std::set<CandidateKey> rejected;
  int next_name = 1;
  for (int iteration = 1;; ++iteration) {
    std::vector<CubeState> unsolved = unsolved_configs();
    if (unsolved.empty()) {
      result.stop_reason = "all configurations solved";
      break;
    }
    if (lib.macros.size() >= params.macro_cap) {
      result.stop_reason = "macro cap reached";
      break;
    }
    if (iteration > params.iteration_cap) {
      result.stop_reason = "iteration cap reached";
      break;
    }
    IterationLog log;
    log.iteration = iteration;
    log.unsolved_before = unsolved.size();

    std::vector<CubeState> fresh;
    for (const auto& s : unsolved)
      if (!memo.contains(s)) fresh.push_back(s);
    auto per_config = discover_per_config(fresh, goal, heuristics, params.discovery, nullptr, true);
    for (std::size_t i = 0; i < fresh.size(); ++i) memo.emplace(fresh[i], std::move(per_config[i]));
    std::vector<const std::vector<MacroCandidate>*> groups;
    for (const auto& s : unsolved) groups.push_back(&memo.at(s));
    std::vector<MacroCandidate> candidates = merge_candidates(groups);
    std::erase_if(candidates, [&](const MacroCandidate& c) { return c.complexity > params.complexity_cap; });
    for (const auto& c : candidates) log.candidate_complexities.push_back(c.complexity);

    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto key = key_of(candidates[i]);
      if (rejected.contains(key)) {
        log.rejected.push_back(format_moves(candidates[i].sequence) + ": rejected earlier");
        continue;
      }
      std::string reason;
      auto macro = build_macro(candidates[i], unsolved, goal, params, "M" + std::to_string(next_name), &reason);
      if (!macro) {
        rejected.insert(key);
        log.rejected.push_back(format_moves(candidates[i].sequence) + ": " + reason);
        continue;
      }
      ++next_name;
      log.chosen_candidate = i;
      log.chosen_name = macro->name;
      log.chosen_moves = format_moves(macro->sequence);
      log.chosen_complexity = macro->complexity;
      const auto at = std::upper_bound(lib.macros.begin(), lib.macros.end(), macro->complexity,
                                       [](int cx, const MacroAction& m) { return cx < m.complexity; });
      lib.macros.insert(at, std::move(*macro));
      break;
    }
    if (!log.chosen_candidate) {
      log.unsolved_after = log.unsolved_before;
      result.log.push_back(std::move(log));
      result.stop_reason = candidates.empty() ? "no candidates" : "every candidate was rejected";
      break;
    }
    for (auto& c : configs) c = apply_until_stuck(c, lib, frames, kFixpointSteps);
    log.unsolved_after = unsolved_configs().size();
    result.log.push_back(std::move(log));
  }
  ++lib.revision;
  result.unsolved = unsolved_configs();
  result.solve_rate = 1.0 - static_cast<double>(result.unsolved.size()) / static_cast<double>(configs.size());
  return result;
}

std::string library_to_json(const MacroLibrary& library) {
  nlohmann::json j;
  j["format"] = kLibraryFormat;
  j["format_version"] = kLibraryVersion;
  j["revision"] = library.revision;
  j["goal"] = library.goal_name;
  j["goal_pattern"] = library.goal.to_pattern();
  j["metadata"] = {{"seed", library.seed},
                   {"config_count", library.config_count},
                   {"depth_min", library.depth.min},
                   {"depth_max", library.depth.max}};
  j["macros"] = nlohmann::json::array();
  for (const auto& m : library.macros) {
    j["macros"].push_back({{"name", m.name},
                           {"precondition", to_string(m.precondition)},
                           {"moves", format_moves(m.sequence)},
                           {"effect", effect_json(m.effect)},
                           {"complexity", m.complexity},
                           {"source", {{"position", position_code(m.source_position)},
                                       {"orientation", m.source_orientation}}},
                           {"examples", {{"positives", m.positives}, {"negatives", m.negatives}}},
                           {"validation", {{"states", m.validation.states},
                                           {"effect_failures", m.validation.effect_failures},
                                           {"protection_violations", m.validation.protection_violations},
                                           {"held_out", m.validation.held_out},
                                           {"held_out_accuracy", m.validation.held_out_accuracy}}}});
  }
  return j.dump(2);
}

MacroLibrary library_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kLibraryFormat) throw std::runtime_error("not a macro library");
    if (j.at("format_version").get<int>() != kLibraryVersion)
      throw std::runtime_error("unsupported macro library version " + j.at("format_version").dump());
    MacroLibrary lib;
    lib.revision = j.at("revision").get<int>();
    lib.goal_name = j.at("goal").get<std::string>();
    lib.goal = PartialGoal::from_pattern(j.at("goal_pattern").get<std::string>());
    const auto& meta = j.at("metadata");
    lib.seed = meta.at("seed").get<std::uint64_t>();
    lib.config_count = meta.at("config_count").get<std::size_t>();
    lib.depth = {meta.at("depth_min").get<int>(), meta.at("depth_max").get<int>()};
    for (const auto& jm : j.at("macros")) {
      MacroAction m;
      m.name = jm.at("name").get<std::string>();
      m.precondition = parse_program(jm.at("precondition").get<std::string>());
      m.sequence = parse_moves(jm.at("moves").get<std::string>());
      const auto& e = jm.at("effect");
      m.effect.target = cubelet_or_throw(e.at("target").get<std::string>());
      for (const auto& p : e.at("protected")) m.effect.protected_cubelets.push_back(cubelet_or_throw(p.get<std::string>()));
      m.effect.description = e.at("description").get<std::string>();
      m.complexity = jm.at("complexity").get<int>();
      if (m.complexity != static_cast<int>(m.sequence.size()))
        throw std::runtime_error("macro " + m.name + " complexity does not match its move count");
      const auto pos = position_from_code(jm.at("source").at("position").get<std::string>());
      if (!pos) throw std::runtime_error("unknown source position in macro " + m.name);
      m.source_position = *pos;
      m.source_orientation = jm.at("source").at("orientation").get<int>();
      m.positives = jm.at("examples").at("positives").get<std::size_t>();
      m.negatives = jm.at("examples").at("negatives").get<std::size_t>();
      const auto& v = jm.at("validation");
      m.validation = {v.at("states").get<std::size_t>(), v.at("effect_failures").get<std::size_t>(),
                      v.at("protection_violations").get<std::size_t>(), v.at("held_out").get<std::size_t>(),
                      v.at("held_out_accuracy").get<double>()};
      lib.macros.push_back(std::move(m));
    }
    if (!std::is_sorted(lib.macros.begin(), lib.macros.end(),
                        [](const MacroAction& a, const MacroAction& b) { return a.complexity < b.complexity; }))
      throw std::runtime_error("macros are not in ascending complexity order");
    return lib;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed macro library: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("malformed macro library: ") + e.what());
  }
}

void save_library(const MacroLibrary& library, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << library_to_json(library) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

MacroLibrary load_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read macro library " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return library_from_json(ss.str());
}

std::optional<PartialGoal> named_goal(std::string_view name) {
  if (name == "solved") return PartialGoal::solved();
  if (name == "white-cross") return PartialGoal::white_cross();
  return std::nullopt;
}

}  // namespace cubetutor

#pragma once

// Macro discovery: scrambled configurations, focused-effect candidates,
// precondition induction, validation and greedy library application.
//
// Macros are stored in a canonical frame: among the whole-cube rotations
// that leave the goal unchanged, the one that moves the target cubelet to
// the lowest position id. A macro applies to a state in frame k when its
// precondition holds on transform_state(state, k); the moves are then
// rotated back with inverse_frame(k).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubetutor/induction.hpp"
#include "cubetutor/search.hpp"
#include "cubetutor/value_table.hpp"

namespace cubetutor {

struct DepthRange {
  int min = 1;
  int max = 20;
};

/// Throws std::invalid_argument on n == 0 or an empty/invalid range.
std::vector<CubeState> generate_configurations(std::size_t n, DepthRange depth, std::uint64_t seed);

/// Cubelets whose facelets the goal fixes completely, ascending.
std::vector<int> goal_cubelets(const PartialGoal& goal);
/// Rotation frames that leave the goal unchanged (always contains 0).
std::vector<int> goal_frames(const PartialGoal& goal);
PartialGoal transform_goal(const PartialGoal& goal, int frame);

struct MacroCandidate {
  MoveSequence sequence;  // canonical frame
  FocusedEffect effect;   // canonical frame
  CubeState source;       // canonical frame
  int source_position = 0;
  int source_orientation = 0;
  int complexity = 0;
  std::size_t merged_sources = 1;
};

/// Canonical candidate from a solved focused search on `state` (any frame).
MacroCandidate make_candidate(const CubeState& state, const MoveSequence& sequence, const FocusedEffect& effect,
                              const PartialGoal& goal);

struct DiscoveryStats {
  std::size_t searches = 0;
  std::size_t failures = 0;
};

struct DiscoveryParams {
  std::size_t node_budget = 200000;
  double weight = 1.0;
};

/// Candidates sorted by (complexity, move string, target, source position,
/// source orientation), duplicates merged.
std::vector<MacroCandidate> discover_candidates(std::span<const CubeState> configs, const PartialGoal& goal,
                                                HeuristicCache& heuristics, const DiscoveryParams& params = {},
                                                DiscoveryStats* stats = nullptr);
std::vector<MacroCandidate> discover_candidates_serial(std::span<const CubeState> configs, const PartialGoal& goal,
                                                       HeuristicCache& heuristics, const DiscoveryParams& params = {},
                                                       DiscoveryStats* stats = nullptr);

bool candidate_less(const MacroCandidate& a, const MacroCandidate& b);
/// Minimal complexity, ties by move string. Throws std::invalid_argument if empty.
const MacroCandidate& select_lowest_complexity(std::span<const MacroCandidate> candidates);

/// Labeling rule: after the sequence the target is placed and every goal
/// cubelet placed beforehand is still placed.
bool achieves_effect(const CubeState& state, const MoveSequence& sequence, int target,
                     std::span<const int> goal_cubelets);

class InsufficientExamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExampleParams {
  std::size_t structured = 600;   // target at its source, other goal cubelets placed at random
  std::size_t uniform = 300;      // uniformly random reachable states
  std::size_t near_misses = 300;  // positives perturbed by one move
  std::size_t min_positives = 5;
  std::uint64_t seed = 11;
};

/// Labels the canonical-frame configs plus sampled states by applying the
/// candidate's sequence. Throws InsufficientExamples below min_positives.
ExampleSet generate_examples(const MacroCandidate& candidate, std::span<const CubeState> configs,
                             const PartialGoal& goal, const ExampleParams& params = {});

struct MacroValidation {
  std::size_t states = 0;  // precondition-satisfying held-out states
  std::size_t effect_failures = 0;
  std::size_t protection_violations = 0;
  std::size_t held_out = 0;  // labeled held-out states for accuracy
  double held_out_accuracy = 0.0;

  bool sound() const { return states > 0 && effect_failures == 0 && protection_violations == 0; }
};

struct MacroAction {
  std::string name;
  PredicateProgram precondition;
  MoveSequence sequence;
  FocusedEffect effect;
  int complexity = 0;
  int source_position = 0;
  int source_orientation = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  MacroValidation validation;
};

/// Held-out check: `count` precondition-satisfying states drawn around the
/// macro's source plus a labeled accuracy sample.
MacroValidation validate_macro(const MacroAction& macro, const PartialGoal& goal, std::size_t count,
                               std::uint64_t seed);

struct MacroLibrary {
  std::string goal_name;
  PartialGoal goal;
  std::vector<MacroAction> macros;  // ascending complexity
  std::uint64_t seed = 0;
  std::size_t config_count = 0;
  DepthRange depth;
  int revision = 0;
};

class PreconditionUnsatisfied : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First frame (in goal_frames order) where the precondition holds.
std::optional<int> applicable_frame(const CubeState& state, const MacroAction& macro, std::span<const int> frames);
/// Moves of the macro as they must be played on the state, or nullopt.
std::optional<MoveSequence> macro_moves_for(const CubeState& state, const MacroAction& macro,
                                            std::span<const int> frames);
/// Throws PreconditionUnsatisfied when no frame matches.
CubeState apply_macro(const CubeState& state, const MacroAction& macro, std::span<const int> frames = {});

enum class GreedyStatus { Solved, NoApplicableMacro, StepCap };

struct GreedyStep {
  std::size_t macro_index;
  int frame;
  MoveSequence moves;
};

struct GreedyResult {
  GreedyStatus status = GreedyStatus::NoApplicableMacro;
  MoveSequence sequence;
  std::vector<GreedyStep> steps;
  bool solved() const { return status == GreedyStatus::Solved; }
};

/// step_cap bounds the number of macro applications.
GreedyResult greedy_solve_with_library(const CubeState& state, const MacroLibrary& library, int step_cap = 16);

struct LearnParams {
  std::size_t config_count = 200;
  DepthRange depth{1, 20};
  std::uint64_t seed = 1;
  int complexity_cap = 8;
  std::size_t macro_cap = 48;
  int iteration_cap = 64;
  InductionParams induction;
  ExampleParams examples;
  DiscoveryParams discovery;
  TableParams tables;
  std::size_t validation_states = 100;
  double held_out_threshold = 0.95;
  int induction_rounds = 5;
};

struct IterationLog {
  int iteration = 0;
  std::size_t unsolved_before = 0;
  std::size_t unsolved_after = 0;
  std::vector<int> candidate_complexities;         // sorted candidate order
  std::vector<std::string> rejected;               // "<moves>: <reason>"
  std::optional<std::size_t> chosen_candidate;     // index into the sorted candidates
  std::string chosen_name;
  std::string chosen_moves;
  int chosen_complexity = 0;
};

struct LearnResult {
  MacroLibrary library;
  std::vector<IterationLog> log;
  std::vector<CubeState> unsolved;  // configs left unsolved
  double solve_rate = 0.0;          // over the training configs
  std::string stop_reason;
};

LearnResult learn_macro_library(const PartialGoal& goal, std::string goal_name, const LearnParams& params,
                                HeuristicCache& heuristics);
/// Same loop over caller-supplied configurations (config_count, depth and
/// seed in params are then only recorded as metadata).
LearnResult learn_from_configs(const PartialGoal& goal, std::string goal_name, std::vector<CubeState> configs,
                               const LearnParams& params, HeuristicCache& heuristics);

/// Induce and validate a macro for one candidate; nullopt with a reason on failure.
std::optional<MacroAction> build_macro(const MacroCandidate& candidate, std::span<const CubeState> configs,
                                       const PartialGoal& goal, const LearnParams& params, std::string name,
                                       std::string* reason = nullptr);

void save_library(const MacroLibrary& library, const std::filesystem::path& path);
/// Throws std::runtime_error on malformed files.
MacroLibrary load_library(const std::filesystem::path& path);
std::string library_to_json(const MacroLibrary& library);
MacroLibrary library_from_json(const std::string& text);

/// Named goals accepted by tools and the service: "solved", "white-cross".
std::optional<PartialGoal> named_goal(std::string_view name);

}  // namespace cubetutor

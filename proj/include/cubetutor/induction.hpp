#pragma once

// Precondition induction by complexity-ordered clause enumeration.
//
// Greedy set cover over the positives: the first uncovered positive seeds a
// clause built from atoms true in it; clauses are tried by increasing size
// and the one rejecting every negative with the largest positive coverage
// wins (ties go to the canonically smallest atom tuple).

#include <cstddef>
#include <string>
#include <vector>

#include "cubetutor/predicates.hpp"

namespace cubetutor {

struct ExampleSet {
  std::vector<CubeState> positives;
  std::vector<CubeState> negatives;
};

struct InductionParams {
  int max_clause_size = 4;
  int max_clauses = 3;
};

struct InductionResult {
  bool ok = false;
  PredicateProgram program;      // partial when !ok
  std::size_t positives_covered = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::string failure;           // empty when ok
};

/// Throws std::invalid_argument when there are no positives.
InductionResult induce_program(const ExampleSet& examples, const InductionParams& params = {});
/// Same search without OpenMP, kept as the reference for equality tests.
InductionResult induce_program_serial(const ExampleSet& examples, const InductionParams& params = {});

}  // namespace cubetutor

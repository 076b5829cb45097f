#include <random>
#include <set>

#include "doctest.h"

#include "cubetutor/induction.hpp"
#include "cubetutor/macros.hpp"

using namespace cubetutor;

namespace {

CubeState worked_state() { return apply_sequence(solved_state(), parse_moves("F' R' F D")); }

ExampleSet label_with(const PredicateProgram& hidden, std::size_t n, std::uint64_t seed,
                      const std::vector<CubeletPlacement>& bias = {}) {
  std::mt19937_64 rng(seed);
  ExampleSet ex;
  std::set<CubeState> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const CubeState s = i % 2 == 0 ? random_state(rng, bias) : random_state(rng);
    if (!seen.insert(s).second) continue;
    (evaluate_program(hidden, s) ? ex.positives : ex.negatives).push_back(s);
  }
  return ex;
}

}  // namespace

TEST_CASE("vocabulary is closed and round-trips through text") {
  const auto& vocab = vocabulary();
  CHECK(vocab.size() == 12 * 12 * 2 + 8 * 8 * 3 + 20 * 2 + (12 * 2 + 8 * 3) * 6 + 48 * 6);
  std::set<std::string> texts;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string t = to_string(vocab[i]);
    texts.insert(t);
    CHECK(parse_predicate(t) == vocab[i]);
    CHECK(atom_index(vocab[i]) == i);
  }
  CHECK(texts.size() == vocab.size());
  CHECK(to_string(Predicate::edge_slot(4, 0, 1)) == "edge_slot(DR,WO,1)");
  CHECK(to_string(Predicate::placed(0, true)) == "not placed(WO)");
  CHECK(to_string(Predicate::aligned(0, Color::White, Color::Orange)) == "aligned(WO.W,O)");
  CHECK(to_string(Predicate::sticker_at(facelet_index(Face::R, 3), Color::White)) == "sticker_at(R3,W)");
}

TEST_CASE("program text") {
  CHECK(to_string(PredicateProgram{}) == "false");
  CHECK(parse_program("false").clauses.empty());
  const auto always = parse_program("true");
  REQUIRE(always.clauses.size() == 1);
  CHECK(always.clauses[0].empty());
  const std::string text = "edge_slot(DR,WO,1) AND not placed(WB) OR placed(WO)";
  CHECK(to_string(parse_program(text)) == text);
  for (const char* bad : {"", "edge_slot(DR,WO)", "placed(XX)", "not aligned(WO.W,O)", "sticker_at(R4,W)",
                          "edge_slot(URF,WO,0)", "edge_slot(DR,WO,2)", "foo(WO)", "placed(WO"})
    CHECK_THROWS_AS(parse_program(bad), std::invalid_argument);
}

TEST_CASE("evaluation") {
  const CubeState s = worked_state();
  CHECK_FALSE(evaluate_program(PredicateProgram{}, s));
  CHECK(evaluate_program(parse_program("true"), s));
  CHECK(evaluate_program(parse_program("edge_slot(DR,WO,1)"), s));
  CHECK(evaluate_program(parse_program("aligned(WO.W,O) AND aligned(WO.O,Y)"), s));
  CHECK(evaluate_program(parse_program("not placed(WO) AND placed(WB)"), s));
  CHECK(evaluate_program(parse_program("sticker_at(R7,W)"), s));
  CHECK_FALSE(evaluate_program(parse_program("edge_slot(DR,WO,1)"), solved_state()));
  CHECK(evaluate_program(parse_program("placed(WO) AND aligned(WO.W,W)"), solved_state()));
  const CubeState copy = s;
  evaluate_program(parse_program("placed(WO)"), s);
  CHECK(copy == s);
}

TEST_CASE("predicate grouping for explanations") {
  const auto one = program_to_predicates(parse_program("placed(WB) AND edge_slot(DR,WO,1) AND not placed(WO)"));
  REQUIRE(one.size() == 1);
  REQUIRE(one[0].size() == 3);
  CHECK(to_string(one[0][0]) == "edge_slot(DR,WO,1)");
  CHECK(to_string(one[0][1]) == "not placed(WO)");
  CHECK(to_string(one[0][2]) == "placed(WB)");
  const auto two = program_to_predicates(parse_program("placed(WO) OR placed(WB)"));
  REQUIRE(two.size() == 2);
  CHECK(to_string(two[0][0]) == "placed(WO)");
  CHECK(to_string(two[1][0]) == "placed(WB)");
}

TEST_CASE("a single separating atom gives a one-atom program") {
  const auto hidden = parse_program("sticker_at(R3,W)");
  const ExampleSet ex = label_with(hidden, 400, 1);
  REQUIRE(ex.positives.size() >= 5);
  const auto r = induce_program(ex);
  REQUIRE(r.ok);
  REQUIRE(r.program.clauses.size() == 1);
  CHECK(r.program.clauses[0].size() == 1);
  for (const auto& s : ex.positives) CHECK(evaluate_program(r.program, s));
  for (const auto& s : ex.negatives) CHECK_FALSE(evaluate_program(r.program, s));
}

TEST_CASE("parallel and serial induction agree") {
  const std::vector<std::pair<std::string, std::vector<CubeletPlacement>>> hidden = {
      {"edge_slot(DR,WO,1) AND not placed(WB)", {{0, 4, 1}}},
      {"edge_slot(FR,WO,0) OR edge_slot(UB,WO,1) AND placed(WG)", {{0, 8, 0}}},
      {"placed(WO) AND placed(WB)", {{0, 0, 0}}},
  };
  std::uint64_t seed = 10;
  for (const auto& [h, bias] : hidden) {
    const ExampleSet ex = label_with(parse_program(h), 600, ++seed, bias);
    REQUIRE(ex.positives.size() >= 5);
    const auto par = induce_program(ex);
    const auto ser = induce_program_serial(ex);
    CHECK(par.ok == ser.ok);
    CHECK(to_string(par.program) == to_string(ser.program));
    if (par.ok) {
      for (const auto& s : ex.positives) CHECK(evaluate_program(par.program, s));
      for (const auto& s : ex.negatives) CHECK_FALSE(evaluate_program(par.program, s));
    }
  }
}

TEST_CASE("induction failure reports coverage") {
  const auto hidden = parse_program("edge_slot(DR,WO,1) AND edge_slot(UF,WB,1)");
  const ExampleSet ex = label_with(hidden, 800, 3, {{0, 4, 1}});
  REQUIRE(ex.positives.size() >= 1);
  InductionParams tight;
  tight.max_clause_size = 1;
  tight.max_clauses = 1;
  const auto r = induce_program(ex, tight);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.failure.empty());
  CHECK(r.positives == ex.positives.size());
  CHECK(r.positives_covered < r.positives);
  CHECK_THROWS_AS(induce_program(ExampleSet{}), std::invalid_argument);
}

TEST_CASE("worked macro examples induce the expected precondition") {
  const PartialGoal goal = PartialGoal::white_cross();
  const FocusedEffect effect{0, {1, 2, 3}, describe_effect(0)};
  const MacroCandidate cand = make_candidate(worked_state(), parse_moves("D' F' R F"), effect, goal);
  CHECK(cand.source == worked_state());
  const auto configs = generate_configurations(100, {1, 20}, 5);
  const ExampleSet ex = generate_examples(cand, configs, goal);
  REQUIRE(!ex.positives.empty());
  CHECK(ex.positives.front() == worked_state());
  const auto gc = goal_cubelets(goal);
  CHECK_FALSE(achieves_effect(solved_state(), cand.sequence, 0, gc));
  for (const auto& s : ex.positives) CHECK(achieves_effect(s, cand.sequence, 0, gc));
  for (const auto& s : ex.negatives) CHECK_FALSE(achieves_effect(s, cand.sequence, 0, gc));

  const auto r = induce_program(ex);
  REQUIRE(r.ok);
  CHECK(evaluate_program(r.program, worked_state()));
  CHECK_FALSE(evaluate_program(r.program, solved_state()));

  // entailment: white sticker on the orange face, orange sticker on the yellow face
  const auto entailed = parse_program("aligned(WO.W,O) AND aligned(WO.O,Y)");
  std::mt19937_64 rng(9);
  int satisfied = 0;
  for (int i = 0; i < 3000; ++i) {
    const CubeState s = i % 2 ? random_state(rng, std::vector<CubeletPlacement>{{0, 4, 1}}) : random_state(rng);
    if (!evaluate_program(r.program, s)) continue;
    ++satisfied;
    CHECK(evaluate_program(entailed, s));
  }
  CHECK(satisfied > 100);

  // adding negatives never widens the accepted set on the same distribution
  ExampleSet more = ex;
  std::mt19937_64 rng2(77);
  for (int i = 0; i < 300; ++i) {
    const CubeState s = random_state(rng2, std::vector<CubeletPlacement>{{0, 4, 1}});
    if (!achieves_effect(s, cand.sequence, 0, gc)) more.negatives.push_back(s);
  }
  const auto r2 = induce_program(more);
  REQUIRE(r2.ok);
  std::mt19937_64 rng3(5);
  for (int i = 0; i < 2000; ++i) {
    const CubeState s = i % 2 ? random_state(rng3, std::vector<CubeletPlacement>{{0, 4, 1}}) : random_state(rng3);
    if (evaluate_program(r2.program, s)) CHECK(evaluate_program(r.program, s));
  }
}

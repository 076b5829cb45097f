// Serial reference vs OpenMP versions of the hot kernels.

#include <benchmark/benchmark.h>

#include "cubetutor/bias.hpp"
#include "cubetutor/induction.hpp"
#include "cubetutor/macros.hpp"

using namespace cubetutor;

namespace {

const std::vector<CubeState>& discovery_configs() {
  static const auto configs = generate_configurations(24, {1, 20}, 7);
  return configs;
}

template <bool Parallel>
void BM_DiscoverCandidates(benchmark::State& state) {
  const PartialGoal goal = PartialGoal::white_cross();
  HeuristicCache cache(LearnParams{}.tables);
  for (auto _ : state) {
    auto c = Parallel ? discover_candidates(discovery_configs(), goal, cache)
                      : discover_candidates_serial(discovery_configs(), goal, cache);
    benchmark::DoNotOptimize(c);
  }
}

const ExampleSet& induction_examples() {
  static const ExampleSet ex = [] {
    ExampleSet e;
    const MoveSequence seq = parse_moves("D' F' R F");
    for (const auto& s : generate_configurations(3000, {1, 20}, 11)) {
      if (is_placed(s, 0)) continue;
      (achieves_effect(s, seq, 0, {}) ? e.positives : e.negatives).push_back(s);
    }
    return e;
  }();
  return ex;
}

template <bool Parallel>
void BM_InduceProgram(benchmark::State& state) {
  for (auto _ : state) {
    auto r = Parallel ? induce_program(induction_examples()) : induce_program_serial(induction_examples());
    benchmark::DoNotOptimize(r);
  }
}

void BM_ScoreAll(benchmark::State& state) {
  const TemplateCorpus corpus = load_corpus_csv("data/eec.csv");
  const auto sentences = expand_templates(corpus);
  const auto scorer = gender_skewed_scorer(corpus);
  for (auto _ : state) benchmark::DoNotOptimize(score_all(scorer, "skewed", sentences));
}

}  // namespace

BENCHMARK(BM_DiscoverCandidates<false>)->Name("discover_candidates/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscoverCandidates<true>)->Name("discover_candidates/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InduceProgram<false>)->Name("induce_program/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InduceProgram<true>)->Name("induce_program/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreAll)->Name("score_all/openmp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

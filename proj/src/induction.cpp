#include "cubetutor/induction.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>
#include <stdexcept>

namespace cubetutor {

namespace {

using Words = std::vector<std::uint64_t>;

std::size_t popcount_and(const Words& a, const Words& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return n;
}

bool any(const Words& a) {
  return std::any_of(a.begin(), a.end(), [](std::uint64_t w) { return w != 0; });
}

void and_into(Words& out, const Words& a, const Words& b) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] & b[i];
}

struct Truth {
  std::vector<Words> pos, neg;  // per atom
};

Truth truth_table(const ExampleSet& ex, bool parallel) {
  const auto& atoms = vocabulary();
  std::vector<CubieView> pv, nv;
  for (const auto& s : ex.positives) pv.push_back(locate(s));
  for (const auto& s : ex.negatives) nv.push_back(locate(s));
  Truth t;
  t.pos.assign(atoms.size(), Words((ex.positives.size() + 63) / 64, 0));
  t.neg.assign(atoms.size(), Words((ex.negatives.size() + 63) / 64, 0));
  const auto n_atoms = static_cast<std::int64_t>(atoms.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t a = 0; a < n_atoms; ++a) {
    const auto i = static_cast<std::size_t>(a);
    for (std::size_t k = 0; k < ex.positives.size(); ++k)
      if (evaluate(atoms[i], ex.positives[k], pv[k])) t.pos[i][k / 64] |= 1ull << (k % 64);
    for (std::size_t k = 0; k < ex.negatives.size(); ++k)
      if (evaluate(atoms[i], ex.negatives[k], nv[k])) t.neg[i][k / 64] |= 1ull << (k % 64);
  }
  return t;
}

struct Best {
  std::size_t coverage = 0;
  std::vector<std::size_t> combo;  // indices into the candidate list
};

// Enumerates clauses of exactly `size` candidates whose first element is
// `first`, in lexicographic order; keeps the strictly best coverage.
void search_from(std::size_t first, std::size_t size, const std::vector<std::size_t>& cand, const Truth& t,
                 const Words& uncovered, Best& best, const std::atomic<std::size_t>* shared_best) {
  const std::size_t pw = uncovered.size(), nw = t.neg.empty() ? 0 : t.neg[0].size();
  std::vector<Words> pos_at(size, Words(pw)), neg_at(size, Words(nw));
  std::vector<std::size_t> combo(size);
  pos_at[0] = t.pos[cand[first]];
  neg_at[0] = t.neg[cand[first]];
  combo[0] = first;

  auto bound = [&] {
    std::size_t b = best.coverage;
    if (shared_best) b = std::max(b, shared_best->load(std::memory_order_relaxed));
    return b;
  };
  auto consider = [&](std::size_t depth) {
    const std::size_t cov = popcount_and(pos_at[depth], uncovered);
    if (any(neg_at[depth])) return;
    if (cov > best.coverage && cov >= bound()) {
      best.coverage = cov;
      best.combo.assign(combo.begin(), combo.begin() + static_cast<std::ptrdiff_t>(depth + 1));
    }
  };
  if (size == 1) {
    consider(0);
    return;
  }
  // iterative DFS over the remaining positions
  std::vector<std::size_t> next(size, 0);
  std::size_t depth = 1;
  next[1] = first + 1;
  while (depth >= 1) {
    if (next[depth] >= cand.size()) {
      --depth;
      if (depth >= 1) ++next[depth];
      continue;
    }
    const std::size_t c = next[depth];
    combo[depth] = c;
    and_into(pos_at[depth], pos_at[depth - 1], t.pos[cand[c]]);
    and_into(neg_at[depth], neg_at[depth - 1], t.neg[cand[c]]);
    const std::size_t cov = popcount_and(pos_at[depth], uncovered);
    if (cov == 0 || cov < bound() || (cov == best.coverage && !best.combo.empty())) {
      ++next[depth];
      continue;
    }
    if (depth + 1 == size) {
      consider(depth);
      ++next[depth];
    } else {
      next[depth + 1] = c + 1;
      ++depth;
    }
  }
}

InductionResult induce(const ExampleSet& ex, const InductionParams& params, bool parallel) {
  if (ex.positives.empty()) throw std::invalid_argument("induction needs at least one positive example");
  const auto& atoms = vocabulary();
  const Truth t = truth_table(ex, parallel);

  InductionResult result;
  result.positives = ex.positives.size();
  result.negatives = ex.negatives.size();
  Words uncovered((ex.positives.size() + 63) / 64, 0);
  for (std::size_t k = 0; k < ex.positives.size(); ++k) uncovered[k / 64] |= 1ull << (k % 64);

  while (any(uncovered)) {
    if (static_cast<int>(result.program.clauses.size()) >= params.max_clauses) {
      result.failure = "clause limit reached";
      break;
    }
    if (ex.negatives.empty()) {
      result.program.clauses.push_back({});
      uncovered.assign(uncovered.size(), 0);
      break;
    }
    std::size_t seed = 0;
    while (!((uncovered[seed / 64] >> (seed % 64)) & 1u)) ++seed;

    // atoms true in the seed, first representative of each distinct truth pattern
    std::vector<std::size_t> cand;
    std::map<std::pair<Words, Words>, bool> seen;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (!((t.pos[a][seed / 64] >> (seed % 64)) & 1u)) continue;
      if (seen.emplace(std::make_pair(t.pos[a], t.neg[a]), true).second) cand.push_back(a);
    }

    Best chosen;
    for (int size = 1; size <= params.max_clause_size && chosen.combo.empty(); ++size) {
      const auto sz = static_cast<std::size_t>(size);
      if (cand.size() < sz) break;
      const std::size_t firsts = cand.size() - sz + 1;
      std::vector<Best> per_first(firsts);
      std::atomic<std::size_t> shared{0};
      const auto n = static_cast<std::int64_t>(firsts);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
      for (std::int64_t f = 0; f < n; ++f) {
        Best& b = per_first[static_cast<std::size_t>(f)];
        search_from(static_cast<std::size_t>(f), sz, cand, t, uncovered, b, parallel ? &shared : nullptr);
        if (parallel && !b.combo.empty()) {
          std::size_t cur = shared.load();
          while (cur < b.coverage && !shared.compare_exchange_weak(cur, b.coverage)) {
          }
        }
      }
      for (auto& b : per_first)
        if (!b.combo.empty() && b.coverage > chosen.coverage) chosen = b;
    }
    if (chosen.combo.empty()) {
      result.failure = "no clause of size <= " + std::to_string(params.max_clause_size) +
                       " separates positive example " + std::to_string(seed) + " from the negatives";
      break;
    }
    Clause clause;
    Words cover = t.pos[cand[chosen.combo[0]]];
    for (std::size_t i : chosen.combo) {
      clause.push_back(atoms[cand[i]]);
      and_into(cover, cover, t.pos[cand[i]]);
    }
    for (std::size_t w = 0; w < uncovered.size(); ++w) uncovered[w] &= ~cover[w];
    result.program.clauses.push_back(std::move(clause));
  }

  std::size_t left = 0;
  for (auto w : uncovered) left += static_cast<std::size_t>(std::popcount(w));
  result.positives_covered = ex.positives.size() - left;
  result.ok = left == 0;
  if (result.ok) {
    for (const auto& s : ex.positives)
      if (!evaluate_program(result.program, s)) throw std::logic_error("induced program misses a positive");
    for (const auto& s : ex.negatives)
      if (evaluate_program(result.program, s)) throw std::logic_error("induced program accepts a negative");
  }
  return result;
}

}  // namespace

InductionResult induce_program(const ExampleSet& examples, const InductionParams& params) {
  return induce(examples, params, true);
}

InductionResult induce_program_serial(const ExampleSet& examples, const InductionParams& params) {
  return induce(examples, params, false);
}

}  // namespace cubetutor

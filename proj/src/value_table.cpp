#include "cubetutor/value_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cubetutor/cubelets.hpp"
#include "json.hpp"

namespace cubetutor {

namespace {

constexpr int kFieldBits = 6;
constexpr std::string_view kFormatName = "cubetutor-value-table";
constexpr int kFormatVersion = 1;

// Where a sticker at facelet f ends up after each move.
const std::array<std::array<std::uint8_t, kNumFacelets>, kNumMoves>& forward_maps() {
  static const auto maps = [] {
    std::array<std::array<std::uint8_t, kNumFacelets>, kNumMoves> out{};
    for (int m = 0; m < kNumMoves; ++m) {
      const auto& perm = move_permutation(Move::from_index(m));
      for (int j = 0; j < kNumFacelets; ++j)
        out[static_cast<std::size_t>(m)][perm[static_cast<std::size_t>(j)]] = static_cast<std::uint8_t>(j);
    }
    return out;
  }();
  return maps;
}

int get_field(const PatternKey& k, std::size_t i) {
  const std::size_t bit = i * kFieldBits;
  if (bit < 60) return static_cast<int>((k.lo >> bit) & 63u);
  return static_cast<int>((k.hi >> (bit - 60)) & 63u);
}

void set_field(PatternKey& k, std::size_t i, int v) {
  const std::size_t bit = i * kFieldBits;
  if (bit < 60)
    k.lo |= static_cast<std::uint64_t>(v) << bit;
  else
    k.hi |= static_cast<std::uint64_t>(v) << (bit - 60);
}

}  // namespace

ValueTable::ValueTable(const PartialGoal& goal) : goal_(goal) {
  for (int f = 0; f < kNumFaces; ++f) {
    const auto c = goal.at(facelet_index(static_cast<Face>(f), kCenterSlot));
    if (c && *c != home_color(static_cast<Face>(f)))
      throw std::invalid_argument("value tables need centers at their home colors");
  }
  for (int p = 0; p < kNumCubelets; ++p) {
    const auto facelets = position_facelets(p);
    const auto colors = cubelet_colors(p);
    int fixed = 0;
    for (std::size_t i = 0; i < facelets.size(); ++i) {
      const auto c = goal.at(facelets[i]);
      if (!c) continue;
      if (*c != colors[i]) throw std::invalid_argument("value tables need goal cubelets at home colors");
      ++fixed;
    }
    if (fixed == 0) continue;
    if (fixed != static_cast<int>(facelets.size()))
      throw std::invalid_argument("value tables need every constrained cubelet fully fixed");
    cubelets_.push_back(p);
  }
}

PatternKey ValueTable::pattern(const CubeState& state) const {
  const CubieView v = locate(state);
  PatternKey k;
  for (std::size_t i = 0; i < cubelets_.size(); ++i) {
    const int c = cubelets_[i];
    set_field(k, i, position_facelets(v.position_of[static_cast<std::size_t>(c)])[v.orient_of[static_cast<std::size_t>(c)]]);
  }
  return k;
}

PatternKey ValueTable::successor(const PatternKey& key, Move m) const {
  const auto& fwd = forward_maps()[static_cast<std::size_t>(m.index())];
  PatternKey out;
  for (std::size_t i = 0; i < cubelets_.size(); ++i) set_field(out, i, fwd[static_cast<std::size_t>(get_field(key, i))]);
  return out;
}

double ValueTable::bound(const PatternKey& key) const {
  int k = 0;
  for (std::size_t i = 0; i < cubelets_.size(); ++i) k += get_field(key, i) != position_facelets(cubelets_[i])[0];
  return (k + 7) / 8;
}

std::optional<double> ValueTable::lookup(const PatternKey& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return values_[it->second];
}

double ValueTable::estimate(const CubeState& state, const PartialGoal& goal) const {
  if (!(goal == goal_)) return misplaced_bound_heuristic(state, goal);
  const PatternKey key = pattern(state);
  if (auto v = lookup(key)) return *v;
  return bound(key);
}

double ValueTable::backup(std::size_t index) const {
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < kNumMoves; ++m) {
    const PatternKey next = successor(keys_[index], Move::from_index(m));
    const auto it = index_.find(next);
    best = std::min(best, 1.0 + (it == index_.end() ? bound(next) : values_[it->second]));
  }
  return best;
}

double ValueTable::bellman_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (bound(keys_[i]) == 0) continue;  // goal pattern
    worst = std::max(worst, std::abs(values_[i] - backup(i)));
  }
  return worst;
}

ValueTable train_value_table(const PartialGoal& goal, std::size_t samples, int max_depth, int iterations,
                             std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("value table training needs at least one sample");
  if (max_depth < 1) throw std::invalid_argument("value table training needs max_depth >= 1");
  ValueTable table(goal);
  table.info_ = {samples, max_depth, iterations, 0, seed, 0.0};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> depth_dist(1, max_depth);
  std::uniform_int_distribution<int> move_dist(0, kNumMoves - 1);
  std::vector<int> first_depth;
  auto record = [&](const PatternKey& key, int depth) {
    if (table.index_.try_emplace(key, static_cast<std::uint32_t>(table.keys_.size())).second) {
      table.keys_.push_back(key);
      first_depth.push_back(depth);
    }
  };
  const PatternKey home = table.pattern(solved_state());
  record(home, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    const int depth = depth_dist(rng);
    PatternKey key = home;
    int last = -1;
    for (int d = 1; d <= depth; ++d) {
      int m = move_dist(rng);
      if (last >= 0 && Move::from_index(m) == inverse(Move::from_index(last))) m = (m + 2) % kNumMoves;
      key = table.successor(key, Move::from_index(m));
      record(key, d);
      last = m;
    }
  }

  // Gauss-Seidel sweeps ordered by first-seen depth.
  std::vector<std::size_t> order(table.keys_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first_depth[a] < first_depth[b]; });
  std::vector<std::array<std::int32_t, kNumMoves>> succ(table.keys_.size());
  std::vector<std::array<double, kNumMoves>> fallback(table.keys_.size());
  table.values_.resize(table.keys_.size());
  for (std::size_t i = 0; i < table.keys_.size(); ++i) {
    table.values_[i] = table.bound(table.keys_[i]);
    for (int m = 0; m < kNumMoves; ++m) {
      const PatternKey next = table.successor(table.keys_[i], Move::from_index(m));
      const auto it = table.index_.find(next);
      succ[i][static_cast<std::size_t>(m)] = it == table.index_.end() ? -1 : static_cast<std::int32_t>(it->second);
      fallback[i][static_cast<std::size_t>(m)] = table.bound(next);
    }
  }
  for (int it = 0; it < iterations; ++it) {
    double change = 0.0;
    for (std::size_t i : order) {
      if (table.keys_[i] == home) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < kNumMoves; ++m) {
        const auto s = succ[i][m];
        best = std::min(best, 1.0 + (s < 0 ? fallback[i][m] : table.values_[static_cast<std::size_t>(s)]));
      }
      change = std::max(change, std::abs(best - table.values_[i]));
      table.values_[i] = best;
    }
    table.info_.iterations_run = it + 1;
    if (change == 0.0) break;
  }
  table.info_.bellman_residual = table.bellman_residual();
  return table;
}

void ValueTable::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["goal"] = goal_.to_pattern();
  j["cubelets"] = cubelets_;
  j["training"] = {{"samples", info_.samples},
                   {"max_depth", info_.max_depth},
                   {"iterations", info_.iterations},
                   {"iterations_run", info_.iterations_run},
                   {"seed", info_.seed},
                   {"bellman_residual", info_.bellman_residual}};
  std::vector<std::uint64_t> keys;
  keys.reserve(keys_.size() * 2);
  for (const auto& k : keys_) {
    keys.push_back(k.lo);
    keys.push_back(k.hi);
  }
  j["keys"] = keys;
  j["values"] = values_;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write value table to " + path.string());
  out << j.dump();
}

ValueTable ValueTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read value table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.at("format").get<std::string>() != kFormatName) throw std::runtime_error("not a value table file");
    if (j.at("version").get<int>() != kFormatVersion)
      throw std::runtime_error("unsupported value table version " + j.at("version").dump());
    ValueTable table(PartialGoal::from_pattern(j.at("goal").get<std::string>()));
    if (j.at("cubelets").get<std::vector<int>>() != table.cubelets_) throw std::runtime_error("cubelet list mismatch");
    const auto& t = j.at("training");
    table.info_ = {t.at("samples").get<std::size_t>(), t.at("max_depth").get<int>(), t.at("iterations").get<int>(),
                   t.at("iterations_run").get<int>(), t.at("seed").get<std::uint64_t>(),
                   t.at("bellman_residual").get<double>()};
    const auto keys = j.at("keys").get<std::vector<std::uint64_t>>();
    table.values_ = j.at("values").get<std::vector<double>>();
    if (keys.size() != table.values_.size() * 2) throw std::runtime_error("key/value count mismatch");
    for (std::size_t i = 0; i < table.values_.size(); ++i) {
      if (table.values_[i] < 0) throw std::runtime_error("negative value in table");
      table.keys_.push_back({keys[2 * i], keys[2 * i + 1]});
      table.index_.emplace(table.keys_.back(), static_cast<std::uint32_t>(i));
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed value table " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("malformed value table " + path.string() + ": " + e.what());
  }
}

const ValueTable& HeuristicCache::for_effect(const FocusedEffect& effect) {
  std::vector<int> key = effect.protected_cubelets;
  key.push_back(effect.target);
  std::sort(key.begin(), key.end());
  std::lock_guard lock(mutex_);
  auto& slot = tables_[key];
  if (!slot)
    slot = std::make_unique<ValueTable>(
        train_value_table(focused_goal(effect), params_.samples, params_.max_depth, params_.iterations, params_.seed));
  return *slot;
}

std::size_t HeuristicCache::size() const {
  std::lock_guard lock(mutex_);
  return tables_.size();
}

}  // namespace cubetutor

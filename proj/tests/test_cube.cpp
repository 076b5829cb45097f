#include <random>
#include <set>

#include "doctest.h"

#include "cubetutor/cube.hpp"
#include "cubetutor/cubelets.hpp"

using namespace cubetutor;

namespace {

int F(Face f, int slot) { return facelet_index(f, slot); }

// Numbered state so every facelet is distinguishable.
std::array<int, kNumFacelets> apply_to_labels(Move m) {
  std::array<int, kNumFacelets> out{};
  const auto& perm = move_permutation(m);
  for (int i = 0; i < kNumFacelets; ++i) out[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

TEST_CASE("R turn matches a hand-written facelet cycle table") {
  // new[target] = old[source]
  std::vector<std::pair<int, int>> cycles = {
      {F(Face::U, 2), F(Face::F, 2)}, {F(Face::U, 5), F(Face::F, 5)}, {F(Face::U, 8), F(Face::F, 8)},
      {F(Face::F, 2), F(Face::D, 2)}, {F(Face::F, 5), F(Face::D, 5)}, {F(Face::F, 8), F(Face::D, 8)},
      {F(Face::D, 2), F(Face::B, 6)}, {F(Face::D, 5), F(Face::B, 3)}, {F(Face::D, 8), F(Face::B, 0)},
      {F(Face::B, 6), F(Face::U, 2)}, {F(Face::B, 3), F(Face::U, 5)}, {F(Face::B, 0), F(Face::U, 8)},
      {F(Face::R, 0), F(Face::R, 6)}, {F(Face::R, 1), F(Face::R, 3)}, {F(Face::R, 2), F(Face::R, 0)},
      {F(Face::R, 3), F(Face::R, 7)}, {F(Face::R, 5), F(Face::R, 1)}, {F(Face::R, 6), F(Face::R, 8)},
      {F(Face::R, 7), F(Face::R, 5)}, {F(Face::R, 8), F(Face::R, 2)},
  };
  const auto labels = apply_to_labels({Face::R, true});
  std::array<int, kNumFacelets> expected{};
  for (int i = 0; i < kNumFacelets; ++i) expected[static_cast<std::size_t>(i)] = i;
  for (auto [to, from] : cycles) expected[static_cast<std::size_t>(to)] = from;
  CHECK(labels == expected);

  const CubeState r = apply_move(solved_state(), {Face::R, true});
  int differing = 0;
  for (int i = 0; i < kNumFacelets; ++i) differing += r[i] != solved_state()[i];
  CHECK(differing == 12);  // R-face stickers stay orange
}

TEST_CASE("every quarter turn moves 20 facelets and fixes centers") {
  for (int m = 0; m < kNumMoves; ++m) {
    const auto& perm = move_permutation(Move::from_index(m));
    int moved = 0;
    for (int i = 0; i < kNumFacelets; ++i) {
      moved += perm[static_cast<std::size_t>(i)] != i;
      if (is_center(i)) CHECK(perm[static_cast<std::size_t>(i)] == i);
    }
    CHECK(moved == 20);
    std::set<int> image(perm.begin(), perm.end());
    CHECK(image.size() == kNumFacelets);
  }
}

TEST_CASE("group laws") {
  std::mt19937_64 rng(7);
  for (int m = 0; m < kNumMoves; ++m) {
    const Move mv = Move::from_index(m);
    auto [s, seq] = scramble(12, static_cast<std::uint64_t>(m));
    CHECK(apply_sequence(s, {mv, mv, mv, mv}) == s);
    CHECK(apply_move(apply_move(s, mv), inverse(mv)) == s);
    CHECK(apply_sequence(s, invert(seq)) == solved_state());
  }
  // U and D commute; U and R do not
  const CubeState a = apply_sequence(solved_state(), parse_moves("U D"));
  CHECK(a == apply_sequence(solved_state(), parse_moves("D U")));
  CHECK(apply_sequence(solved_state(), parse_moves("U R")) != apply_sequence(solved_state(), parse_moves("R U")));
  // (R U)^105 is the identity, no smaller power is
  MoveSequence ru = parse_moves("R U");
  CubeState s = solved_state();
  int order = 0;
  do {
    s = apply_sequence(s, ru);
    ++order;
  } while (s != solved_state() && order < 200);
  CHECK(order == 105);
}

TEST_CASE("move notation round trip and errors") {
  CHECK(format_moves(parse_moves("D' F' R F")) == "D' F' R F");
  CHECK(format_moves(parse_moves("U,R'")) == "U R'");
  CHECK(parse_moves("").empty());
  CHECK_THROWS_AS(parse_moves("X"), std::invalid_argument);
  CHECK_THROWS_AS(parse_moves("R2"), std::invalid_argument);
  CHECK_THROWS_AS(scramble(0, 1), std::invalid_argument);
}

TEST_CASE("facelet parsing") {
  const std::string solved = format_facelets(solved_state());
  CHECK(solved.substr(0, 9) == "WWWWWWWWW");
  CHECK(parse_facelets(solved) == solved_state());
  auto kind_of = [](const std::string& text) {
    try {
      parse_facelets(text);
    } catch (const FaceletParseError& e) {
      return std::string(to_string(e.kind()));
    }
    return std::string("ok");
  };
  CHECK(kind_of(solved.substr(1)) == "wrong_length");
  std::string bad = solved;
  bad[3] = 'X';
  CHECK(kind_of(bad) == "unknown_character");
  bad[3] = 'w';
  CHECK(kind_of(bad) == "unknown_character");
  bad[3] = 'Y';
  CHECK(kind_of(bad) == "wrong_color_count");
}

TEST_CASE("scramble is deterministic and avoids repeated faces") {
  auto [s1, q1] = scramble(25, 99);
  auto [s2, q2] = scramble(25, 99);
  CHECK(s1 == s2);
  CHECK(q1 == q2);
  for (std::size_t i = 1; i < q1.size(); ++i) CHECK(q1[i].face != q1[i - 1].face);
}

TEST_CASE("partial goals") {
  const PartialGoal cross = PartialGoal::white_cross();
  int fixed = 0;
  for (int i = 0; i < kNumFacelets; ++i) fixed += cross.fixed(i);
  CHECK(fixed == 14);
  CHECK(matches(solved_state(), cross));
  CHECK(matches(apply_move(solved_state(), {Face::D, true}), cross));
  CHECK_FALSE(matches(apply_move(solved_state(), {Face::R, true}), cross));
  CHECK(PartialGoal::from_pattern(cross.to_pattern()) == cross);
  CHECK_THROWS_AS(PartialGoal::from_pattern("W"), std::invalid_argument);
}

TEST_CASE("cubelet tables") {
  CHECK(position_code(4) == "DR");
  CHECK(cubelet_code(0) == "WO");
  CHECK(cubelet_code(1) == "WB");
  CHECK(cubelet_code(4) == "YO");
  CHECK(cubelet_code(8) == "BO");
  CHECK(cubelet_code(12) == "WOB");
  CHECK(cubelet_name(0) == "white-orange edge");
  CHECK(*cubelet_from_code("WO") == 0);
  CHECK(*position_from_code("DRB") == 19);
  std::set<int> facelets;
  for (int p = 0; p < kNumCubelets; ++p)
    for (auto f : position_facelets(p)) {
      facelets.insert(f);
      CHECK(position_of_facelet(f) == p);
    }
  CHECK(facelets.size() == 48);

  const CubieView v = locate(solved_state());
  for (int c = 0; c < kNumCubelets; ++c) CHECK(v.placed(c));
  CHECK(cubelet_positions(solved_state()).size() == 26);
}

TEST_CASE("orientation invariants hold along random move sequences") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto [s, seq] = scramble(30, seed);
    const CubieView v = locate(s);
    int flips = 0, twists = 0;
    for (int p = 0; p < kNumEdges; ++p) flips += v.orient_at[static_cast<std::size_t>(p)];
    for (int p = kNumEdges; p < kNumCubelets; ++p) twists += v.orient_at[static_cast<std::size_t>(p)];
    CHECK(flips % 2 == 0);
    CHECK(twists % 3 == 0);
    CHECK(is_reachable(s));
    CHECK(from_cubies(v.cubelet_at, v.orient_at) == s);
  }
}

TEST_CASE("unreachable states are rejected") {
  const CubieView v = locate(solved_state());
  auto at = v.cubelet_at;
  auto ori = v.orient_at;
  ori[0] = 1;
  CHECK_FALSE(is_reachable(from_cubies(at, ori)));
  ori[0] = 0;
  ori[12] = 1;
  CHECK_FALSE(is_reachable(from_cubies(at, ori)));
  ori[12] = 0;
  std::swap(at[0], at[1]);
  CHECK_FALSE(is_reachable(from_cubies(at, ori)));
  std::swap(at[12], at[13]);
  CHECK(is_reachable(from_cubies(at, ori)));
}

TEST_CASE("random states respect fixed placements") {
  std::mt19937_64 rng(3);
  const std::vector<CubeletPlacement> fixed = {{0, 4, 1}, {1, 1, 0}, {12, 12, 0}};
  for (int i = 0; i < 300; ++i) {
    const CubeState s = random_state(rng, fixed);
    REQUIRE(is_reachable(s));
    const CubieView v = locate(s);
    CHECK(v.position_of[0] == 4);
    CHECK(v.orient_of[0] == 1);
    CHECK(v.placed(1));
    CHECK(v.placed(12));
  }
  std::vector<CubeletPlacement> clash = {{0, 4, 0}, {1, 4, 0}};
  CHECK_THROWS_AS(random_state(rng, clash), std::invalid_argument);
}

TEST_CASE("whole-cube rotation frames") {
  CHECK(transform_face(Face::F, 1) == Face::L);
  CHECK(transform_face(Face::R, 1) == Face::F);
  CHECK(transform_face(Face::U, 1) == Face::U);
  for (int k = 0; k < kNumFrames; ++k) CHECK(transform_state(solved_state(), k) == solved_state());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto [s, seq] = scramble(15, seed);
    for (int k = 0; k < kNumFrames; ++k) {
      const CubeState t = transform_state(s, k);
      CHECK(is_reachable(t));
      CHECK(transform_state(t, inverse_frame(k)) == s);
      CHECK(transform_state(apply_sequence(s, seq), k) == apply_sequence(t, transform_moves(seq, k)));
    }
    CHECK(transform_state(transform_state(s, 1), 1) == transform_state(s, 2));
  }
  std::set<int> images;
  for (int k = 0; k < kNumFrames; ++k) images.insert(transform_position(0, k));
  CHECK(images == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("worked white-cross configuration") {
  const CubeState s = apply_sequence(solved_state(), parse_moves("F' R' F D"));
  const CubieView v = locate(s);
  CHECK(position_code(v.position_of[0]) == "DR");
  CHECK(v.facelet_of(0, Color::White) / 9 == static_cast<int>(Face::R));
  CHECK(v.facelet_of(0, Color::Orange) / 9 == static_cast<int>(Face::D));
  for (int c : {1, 2, 3}) CHECK(v.placed(c));
  CHECK_FALSE(matches(s, PartialGoal::white_cross()));
  const CubeState mid = apply_sequence(s, parse_moves("D' F' R"));
  CHECK(locate(mid).placed(0));
  CHECK(matches(apply_sequence(s, parse_moves("D' F' R F")), PartialGoal::white_cross()));
}

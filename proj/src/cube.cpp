#include "cubetutor/cube.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include "geometry.hpp"

namespace cubetutor {

namespace {

constexpr std::array<char, kNumColors> kColorLetters = {'W', 'Y', 'R', 'O', 'G', 'B'};
constexpr std::array<std::string_view, kNumColors> kColorNames = {"white", "yellow", "red",
                                                                  "orange", "green", "blue"};
constexpr std::array<char, kNumFaces> kFaceLetters = {'U', 'D', 'L', 'R', 'F', 'B'};
constexpr std::array<std::string_view, kNumFaces> kFaceNames = {"top", "bottom", "left",
                                                                "right", "front", "back"};
constexpr std::array<Color, kNumFaces> kHomeColors = {Color::White, Color::Yellow, Color::Red,
                                                      Color::Orange, Color::Blue, Color::Green};

using Permutation = std::array<std::uint8_t, kNumFacelets>;

constexpr std::array<Permutation, kNumMoves> build_move_tables() {
  std::array<Permutation, kNumMoves> tables{};
  for (int m = 0; m < kNumMoves; ++m) {
    const Move move = Move::from_index(m);
    const detail::Vec3 axis = detail::face_normal(move.face);
    Permutation& perm = tables[static_cast<std::size_t>(m)];
    for (int i = 0; i < kNumFacelets; ++i) perm[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    for (int i = 0; i < kNumFacelets; ++i) {
      const detail::Vec3 p = detail::facelet_position(i);
      if (detail::dot(p, axis) != 1) continue;
      const int j = detail::facelet_at(detail::rotate(p, axis, move.clockwise),
                                       detail::rotate(detail::facelet_normal(i), axis, move.clockwise));
      perm[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(i);
    }
  }
  return tables;
}

constexpr std::array<Permutation, kNumMoves> kMoveTables = build_move_tables();

}  // namespace

char color_letter(Color c) { return kColorLetters[static_cast<std::size_t>(c)]; }

std::optional<Color> color_from_letter(char letter) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
  for (int i = 0; i < kNumColors; ++i)
    if (kColorLetters[static_cast<std::size_t>(i)] == up) return static_cast<Color>(i);
  return std::nullopt;
}

std::string_view color_name(Color c) { return kColorNames[static_cast<std::size_t>(c)]; }
char face_letter(Face f) { return kFaceLetters[static_cast<std::size_t>(f)]; }

std::optional<Face> face_from_letter(char letter) {
  for (int i = 0; i < kNumFaces; ++i)
    if (kFaceLetters[static_cast<std::size_t>(i)] == letter) return static_cast<Face>(i);
  return std::nullopt;
}

std::string_view face_name(Face f) { return kFaceNames[static_cast<std::size_t>(f)]; }
Color home_color(Face f) { return kHomeColors[static_cast<std::size_t>(f)]; }

Face home_face(Color c) {
  for (int i = 0; i < kNumFaces; ++i)
    if (kHomeColors[static_cast<std::size_t>(i)] == c) return static_cast<Face>(i);
  return Face::U;
}

MoveSequence invert(const MoveSequence& seq) {
  MoveSequence out;
  out.reserve(seq.size());
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) out.push_back(inverse(*it));
  return out;
}

std::string format_move(Move m) {
  std::string s(1, face_letter(m.face));
  if (!m.clockwise) s += '\'';
  return s;
}

std::string format_moves(const MoveSequence& seq) {
  std::string out;
  for (const Move& m : seq) {
    if (!out.empty()) out += ' ';
    out += format_move(m);
  }
  return out;
}

MoveSequence parse_moves(std::string_view text) {
  MoveSequence seq;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      ++i;
      continue;
    }
    const auto face = face_from_letter(ch);
    if (!face) throw std::invalid_argument("unknown move token starting at '" + std::string(1, ch) + "'");
    ++i;
    bool clockwise = true;
    if (i < text.size() && (text[i] == '\'' || text[i] == '`')) {
      clockwise = false;
      ++i;
    }
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ',')
      throw std::invalid_argument("malformed move token near position " + std::to_string(i));
    seq.push_back({*face, clockwise});
  }
  return seq;
}

CubeState::CubeState() {
  for (int i = 0; i < kNumFacelets; ++i) facelets_[static_cast<std::size_t>(i)] = home_color(facelet_face(i));
}

std::size_t CubeStateHash::operator()(const CubeState& s) const noexcept {
  // FNV-1a over the facelet bytes
  std::uint64_t h = 1469598103934665603ull;
  for (Color c : s.facelets()) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

CubeState solved_state() { return CubeState{}; }

const std::array<std::uint8_t, kNumFacelets>& move_permutation(Move m) {
  return kMoveTables[static_cast<std::size_t>(m.index())];
}

CubeState apply_move(const CubeState& state, Move m) {
  const Permutation& perm = kMoveTables[static_cast<std::size_t>(m.index())];
  CubeState::Facelets out;
  const auto& in = state.facelets();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[perm[i]];
  return CubeState(out);
}

CubeState apply_sequence(const CubeState& state, const MoveSequence& seq) {
  CubeState s = state;
  for (const Move& m : seq) s = apply_move(s, m);
  return s;
}

std::pair<CubeState, MoveSequence> scramble(int depth, std::uint64_t seed) {
  if (depth < 1) throw std::invalid_argument("scramble depth must be at least 1");
  std::mt19937_64 rng(seed);
  MoveSequence seq;
  seq.reserve(static_cast<std::size_t>(depth));
  int last_face = -1;
  for (int i = 0; i < depth; ++i) {
    std::uniform_int_distribution<int> pick(0, last_face < 0 ? kNumFaces - 1 : kNumFaces - 2);
    int face = pick(rng);
    if (last_face >= 0 && face >= last_face) ++face;
    const bool clockwise = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    seq.push_back({static_cast<Face>(face), clockwise});
    last_face = face;
  }
  return {apply_sequence(solved_state(), seq), seq};
}

PartialGoal::PartialGoal() { slots_.fill(-1); }

PartialGoal PartialGoal::solved() {
  PartialGoal g;
  const CubeState s;
  for (int i = 0; i < kNumFacelets; ++i) g.fix(i, s[i]);
  return g;
}

PartialGoal PartialGoal::white_cross() {
  PartialGoal g;
  for (int f = 0; f < kNumFaces; ++f) g.fix(facelet_index(static_cast<Face>(f), kCenterSlot), home_color(static_cast<Face>(f)));
  // U edge slots 1, 3, 5, 7 and the sticker each shares with a side face (top row, middle column).
  for (int slot : {1, 3, 5, 7}) g.fix(facelet_index(Face::U, slot), Color::White);
  for (Face side : {Face::L, Face::R, Face::F, Face::B}) g.fix(facelet_index(side, 1), home_color(side));
  return g;
}

PartialGoal PartialGoal::from_pattern(std::string_view pattern) {
  if (pattern.size() != kNumFacelets)
    throw std::invalid_argument("goal pattern must have 54 characters, got " + std::to_string(pattern.size()));
  PartialGoal g;
  for (int i = 0; i < kNumFacelets; ++i) {
    const char ch = pattern[static_cast<std::size_t>(i)];
    if (ch == '.' || ch == '?') continue;
    const auto c = color_from_letter(ch);
    if (!c) throw std::invalid_argument("unknown goal pattern character '" + std::string(1, ch) + "'");
    g.fix(i, *c);
  }
  return g;
}

std::optional<Color> PartialGoal::at(int facelet) const {
  const auto v = slots_[static_cast<std::size_t>(facelet)];
  if (v < 0) return std::nullopt;
  return static_cast<Color>(v);
}

std::string PartialGoal::to_pattern() const {
  std::string out(kNumFacelets, '.');
  for (int i = 0; i < kNumFacelets; ++i)
    if (auto c = at(i)) out[static_cast<std::size_t>(i)] = color_letter(*c);
  return out;
}

bool matches(const CubeState& state, const PartialGoal& goal) {
  for (int i = 0; i < kNumFacelets; ++i) {
    const auto c = goal.at(i);
    if (c && state[i] != *c) return false;
  }
  return true;
}

std::string_view to_string(FaceletError e) {
  switch (e) {
    case FaceletError::WrongLength: return "wrong_length";
    case FaceletError::UnknownCharacter: return "unknown_character";
    case FaceletError::WrongColorCount: return "wrong_color_count";
  }
  return "unknown";
}

CubeState parse_facelets(std::string_view text) {
  if (text.size() != kNumFacelets)
    throw FaceletParseError(FaceletError::WrongLength,
                            "facelet string must have 54 characters, got " + std::to_string(text.size()));
  CubeState::Facelets f{};
  std::array<int, kNumColors> counts{};
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = color_from_letter(text[i]);
    if (!c || std::islower(static_cast<unsigned char>(text[i])))
      throw FaceletParseError(FaceletError::UnknownCharacter,
                              "unknown facelet character '" + std::string(1, text[i]) + "' at " + std::to_string(i));
    f[i] = *c;
    ++counts[static_cast<std::size_t>(*c)];
  }
  for (int c = 0; c < kNumColors; ++c)
    if (counts[static_cast<std::size_t>(c)] != 9)
      throw FaceletParseError(FaceletError::WrongColorCount,
                              std::string(color_name(static_cast<Color>(c))) + " appears " +
                                  std::to_string(counts[static_cast<std::size_t>(c)]) + " times, expected 9");
  return CubeState(f);
}

std::string format_facelets(const CubeState& state) {
  std::string out;
  out.reserve(kNumFacelets);
  for (Color c : state.facelets()) out += color_letter(c);
  return out;
}

}  // namespace cubetutor

#pragma once

// Facelet model of the 3x3x3 cube.
//
// A state is 54 colors indexed face-major in the order U, D, L, R, F, B with
// nine slots per face, row-major. Face grids are read as follows:
//   U  seen from above, B edge at the top row
//   D  seen from below, F edge at the top row
//   L, R, F, B seen from outside with U at the top row
//
// Home orientation (global): U=white, D=yellow, L=red, R=orange, F=blue,
// B=green.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cubetutor {

enum class Color : std::uint8_t { White, Yellow, Red, Orange, Green, Blue };
enum class Face : std::uint8_t { U, D, L, R, F, B };

inline constexpr int kNumColors = 6;
inline constexpr int kNumFaces = 6;
inline constexpr int kNumFacelets = 54;
inline constexpr int kCenterSlot = 4;

constexpr int facelet_index(Face f, int slot) { return static_cast<int>(f) * 9 + slot; }
constexpr Face facelet_face(int facelet) { return static_cast<Face>(facelet / 9); }
constexpr bool is_center(int facelet) { return facelet % 9 == kCenterSlot; }

char color_letter(Color c);
std::optional<Color> color_from_letter(char letter);
std::string_view color_name(Color c);
char face_letter(Face f);
std::optional<Face> face_from_letter(char letter);
std::string_view face_name(Face f);  // "top", "bottom", ...
Color home_color(Face f);
Face home_face(Color c);

struct Move {
  Face face = Face::U;
  bool clockwise = true;

  constexpr int index() const { return static_cast<int>(face) * 2 + (clockwise ? 0 : 1); }
  static constexpr Move from_index(int i) { return {static_cast<Face>(i / 2), i % 2 == 0}; }
  friend constexpr bool operator==(Move, Move) = default;
};

inline constexpr int kNumMoves = 12;

using MoveSequence = std::vector<Move>;

constexpr Move inverse(Move m) { return {m.face, !m.clockwise}; }
MoveSequence invert(const MoveSequence& seq);

/// Singmaster token: "U", "U'", ...
std::string format_move(Move m);
/// Space-separated Singmaster tokens; empty sequence formats as "".
std::string format_moves(const MoveSequence& seq);
/// Parses whitespace- or comma-separated tokens. Throws std::invalid_argument.
MoveSequence parse_moves(std::string_view text);

class CubeState {
 public:
  using Facelets = std::array<Color, kNumFacelets>;

  /// Solved state.
  CubeState();
  explicit CubeState(const Facelets& facelets) : facelets_(facelets) {}

  Color operator[](int i) const { return facelets_[static_cast<std::size_t>(i)]; }
  const Facelets& facelets() const { return facelets_; }

  friend bool operator==(const CubeState&, const CubeState&) = default;
  friend auto operator<=>(const CubeState&, const CubeState&) = default;

  template <typename H>
  friend H AbslHashValue(H h, const CubeState& s) {
    return H::combine_contiguous(std::move(h), reinterpret_cast<const unsigned char*>(s.facelets_.data()),
                                 s.facelets_.size());
  }

 private:
  Facelets facelets_;
};

struct CubeStateHash {
  std::size_t operator()(const CubeState& s) const noexcept;
};

CubeState solved_state();

/// new[i] = old[perm[i]] for the given move.
const std::array<std::uint8_t, kNumFacelets>& move_permutation(Move m);

CubeState apply_move(const CubeState& state, Move m);
CubeState apply_sequence(const CubeState& state, const MoveSequence& seq);

/// Deterministic scramble; consecutive moves never turn the same face.
/// Throws std::invalid_argument when depth < 1.
std::pair<CubeState, MoveSequence> scramble(int depth, std::uint64_t seed);

/// Per-facelet constraint: a fixed color or a wildcard.
class PartialGoal {
 public:
  /// All wildcards.
  PartialGoal();

  static PartialGoal solved();
  /// Four white edges on U with their side stickers, plus all six centers.
  static PartialGoal white_cross();
  /// 54 characters of WYROGB or '.' for a wildcard.
  static PartialGoal from_pattern(std::string_view pattern);

  std::optional<Color> at(int facelet) const;
  bool fixed(int facelet) const { return slots_[static_cast<std::size_t>(facelet)] >= 0; }
  void fix(int facelet, Color c) { slots_[static_cast<std::size_t>(facelet)] = static_cast<std::int8_t>(c); }
  void release(int facelet) { slots_[static_cast<std::size_t>(facelet)] = -1; }
  std::string to_pattern() const;

  friend bool operator==(const PartialGoal&, const PartialGoal&) = default;

 private:
  std::array<std::int8_t, kNumFacelets> slots_;
};

bool matches(const CubeState& state, const PartialGoal& goal);

enum class FaceletError { WrongLength, UnknownCharacter, WrongColorCount };

class FaceletParseError : public std::invalid_argument {
 public:
  FaceletParseError(FaceletError kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  FaceletError kind() const { return kind_; }

 private:
  FaceletError kind_;
};

std::string_view to_string(FaceletError e);

CubeState parse_facelets(std::string_view text);
std::string format_facelets(const CubeState& state);

}  // namespace cubetutor

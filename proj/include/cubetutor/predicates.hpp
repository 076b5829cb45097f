#pragma once

// Predicate vocabulary for macro preconditions and its text form.
//
//   edge_slot(DR,WO,1)     edge WO sits at DR with orientation 1
//   corner_slot(URF,WOB,0)
//   placed(WO)             cubelet at home, correctly oriented
//   not placed(WO)
//   aligned(WO.W,O)        WO's white sticker lies on the face with the orange center
//   sticker_at(R3,W)       facelet 3 of the R face is white
//
// Programs are disjunctions of conjunctions: atoms joined by " AND ", clauses
// by " OR ". The empty program prints as "false", an empty clause as "true".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubetutor/cube.hpp"
#include "cubetutor/cubelets.hpp"

namespace cubetutor {

enum class PredicateKind : std::uint8_t { EdgeSlot, CornerSlot, Placed, Aligned, StickerAt };

struct Predicate {
  PredicateKind kind = PredicateKind::Placed;
  // EdgeSlot/CornerSlot: position, cubelet, orientation
  // Placed: cubelet, -, -
  // Aligned: cubelet, sticker color, center color
  // StickerAt: facelet, color, -
  int a = 0, b = 0, c = 0;
  bool negated = false;  // only used with Placed

  friend bool operator==(const Predicate&, const Predicate&) = default;

  static Predicate edge_slot(int position, int cubelet, int orientation) {
    return {PredicateKind::EdgeSlot, position, cubelet, orientation, false};
  }
  static Predicate corner_slot(int position, int cubelet, int orientation) {
    return {PredicateKind::CornerSlot, position, cubelet, orientation, false};
  }
  static Predicate placed(int cubelet, bool negated = false) { return {PredicateKind::Placed, cubelet, 0, 0, negated}; }
  static Predicate aligned(int cubelet, Color sticker, Color center) {
    return {PredicateKind::Aligned, cubelet, static_cast<int>(sticker), static_cast<int>(center), false};
  }
  static Predicate sticker_at(int facelet, Color color) {
    return {PredicateKind::StickerAt, facelet, static_cast<int>(color), 0, false};
  }

  /// Cubelet the atom talks about, or -1 for sticker_at.
  int cubelet() const;
};

using Clause = std::vector<Predicate>;

struct PredicateProgram {
  std::vector<Clause> clauses;
  friend bool operator==(const PredicateProgram&, const PredicateProgram&) = default;
};

/// Every atom in canonical order (kind, then arguments).
const std::vector<Predicate>& vocabulary();
/// Position in vocabulary().
std::size_t atom_index(const Predicate& p);

bool evaluate(const Predicate& p, const CubeState& state, const CubieView& view);
bool evaluate_clause(const Clause& clause, const CubeState& state, const CubieView& view);
bool evaluate_program(const PredicateProgram& program, const CubeState& state);

std::string to_string(const Predicate& p);
std::string to_string(const Clause& clause);
std::string to_string(const PredicateProgram& program);

/// Throws std::invalid_argument on malformed text.
Predicate parse_predicate(std::string_view text);
PredicateProgram parse_program(std::string_view text);

/// One group per clause, atoms grouped by the cubelet they mention in order
/// of first mention; within a group atoms keep canonical order.
std::vector<std::vector<Predicate>> program_to_predicates(const PredicateProgram& program);

}  // namespace cubetutor

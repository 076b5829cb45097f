#pragma once

// Cubelet-level view of a facelet state.
//
// Positions and cubelets share one index space: 0..11 are edges in the order
// UR UF UL UB DR DF DL DB FR FL BL BR, 12..19 corners URF UFL ULB UBR DFR DLF
// DBL DRB. A cubelet's id is the id of its home position. Centers never move
// and are not part of this index space.
//
// Orientation of a cubelet in a position is the index (into the position's
// facelet list) of the facelet carrying the cubelet's reference color
// (white/yellow, or blue/green for middle-layer edges).

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cubetutor/cube.hpp"

namespace cubetutor {

inline constexpr int kNumEdges = 12;
inline constexpr int kNumCorners = 8;
inline constexpr int kNumCubelets = kNumEdges + kNumCorners;

enum class CubeletKind : std::uint8_t { Edge, Corner, Center };

constexpr bool is_edge(int cubelet) { return cubelet < kNumEdges; }
constexpr bool is_corner(int cubelet) { return cubelet >= kNumEdges && cubelet < kNumCubelets; }
constexpr int sticker_count(int cubelet) { return is_edge(cubelet) ? 2 : 3; }

struct Cubelet {
  CubeletKind kind;
  std::vector<Color> colors;  // in home-position facelet order
  int current_slot;           // position id
  int home_slot;
};

/// Facelet indices of a position in reference order (2 or 3 entries).
std::span<const std::uint8_t> position_facelets(int position);
/// Faces of a position in reference order, e.g. {D, R} for DR.
std::span<const Face> position_faces(int position);
/// "DR", "URF".
std::string_view position_code(int position);
std::optional<int> position_from_code(std::string_view code);
/// Home colors of a cubelet in reference order.
std::span<const Color> cubelet_colors(int cubelet);
/// "WO", "WOB".
std::string cubelet_code(int cubelet);
std::optional<int> cubelet_from_code(std::string_view code);
/// "white-orange edge", "white-orange-blue corner".
std::string cubelet_name(int cubelet);
/// Position id holding a given non-center facelet.
int position_of_facelet(int facelet);

/// Where every cubelet sits in a state.
struct CubieView {
  std::array<std::uint8_t, kNumCubelets> cubelet_at{};   // position -> cubelet
  std::array<std::uint8_t, kNumCubelets> orient_at{};    // position -> orientation
  std::array<std::uint8_t, kNumCubelets> position_of{};  // cubelet -> position
  std::array<std::uint8_t, kNumCubelets> orient_of{};    // cubelet -> orientation

  bool placed(int cubelet) const {
    return position_of[static_cast<std::size_t>(cubelet)] == cubelet && orient_of[static_cast<std::size_t>(cubelet)] == 0;
  }
  /// Facelet carrying the given color of the cubelet.
  int facelet_of(int cubelet, Color c) const;
};

/// Throws std::invalid_argument if a position holds an unrecognizable color
/// combination or a cubelet appears twice.
CubieView locate(const CubeState& state);
std::optional<CubieView> try_locate(const CubeState& state);

bool is_placed(const CubeState& state, int cubelet);
/// Full cubelet list (26 entries, centers last) with current and home slots.
std::vector<Cubelet> cubelet_positions(const CubeState& state);

/// Reachability by face turns: legal stickers, permutation parity, flip and
/// twist sums, centers at home.
bool is_reachable(const CubeState& state);

struct CubeletPlacement {
  int cubelet;
  int position;
  int orientation;
};

/// Uniformly random reachable state subject to fixed placements.
/// Throws std::invalid_argument if the constraints leave no legal completion.
CubeState random_state(std::mt19937_64& rng, std::span<const CubeletPlacement> fixed = {});

CubeState from_cubies(const std::array<std::uint8_t, kNumCubelets>& cubelet_at,
                      const std::array<std::uint8_t, kNumCubelets>& orient_at);

// Whole-cube quarter turns about the U-D axis (frames 0..3). Frame k maps a
// state into the view obtained after k clockwise turns of the whole cube as
// seen from above, recoloring so that the solved state is fixed.
inline constexpr int kNumFrames = 4;

CubeState transform_state(const CubeState& state, int frame);
Move transform_move(Move m, int frame);
MoveSequence transform_moves(const MoveSequence& seq, int frame);
int transform_facelet(int facelet, int frame);
int transform_position(int position, int frame);
Color transform_color(Color c, int frame);
Face transform_face(Face f, int frame);
constexpr int inverse_frame(int frame) { return (kNumFrames - frame) % kNumFrames; }

}  // namespace cubetutor

#include "cubetutor/cubelets.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "geometry.hpp"

namespace cubetutor {

namespace {

constexpr std::array<std::string_view, kNumCubelets> kPositionCodes = {
    "UR", "UF", "UL", "UB", "DR", "DF", "DL", "DB", "FR", "FL", "BL", "BR",
    "URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DBL", "DRB"};

constexpr std::uint8_t kNone = 0xff;

struct Tables {
  std::array<std::array<std::uint8_t, 3>, kNumCubelets> facelets{};
  std::array<std::array<Face, 3>, kNumCubelets> faces{};
  std::array<std::array<Color, 3>, kNumCubelets> colors{};
  std::array<detail::Vec3, kNumCubelets> where{};
  std::array<int, kNumFacelets> position_of_facelet{};
  // (cubelet << 2 | orientation) or kNone
  std::array<std::array<std::uint8_t, kNumColors>, kNumColors> edge_lookup{};
  std::array<std::array<std::array<std::uint8_t, kNumColors>, kNumColors>, kNumColors> corner_lookup{};

  // symmetry, per frame
  std::array<std::array<std::uint8_t, kNumFacelets>, kNumFrames> facelet_map{};
  std::array<std::array<std::uint8_t, kNumCubelets>, kNumFrames> position_map{};
  std::array<std::array<Color, kNumColors>, kNumFrames> color_map{};
  std::array<std::array<Face, kNumFaces>, kNumFrames> face_map{};

  Tables() {
    position_of_facelet.fill(-1);
    for (int p = 0; p < kNumCubelets; ++p) {
      const auto code = kPositionCodes[static_cast<std::size_t>(p)];
      detail::Vec3 pos{};
      for (std::size_t k = 0; k < code.size(); ++k) {
        const Face f = *face_from_letter(code[k]);
        faces[static_cast<std::size_t>(p)][k] = f;
        colors[static_cast<std::size_t>(p)][k] = home_color(f);
        pos = pos + detail::face_normal(f);
      }
      where[static_cast<std::size_t>(p)] = pos;
      for (std::size_t k = 0; k < code.size(); ++k) {
        const int fi = detail::facelet_at(pos, detail::face_normal(faces[static_cast<std::size_t>(p)][k]));
        facelets[static_cast<std::size_t>(p)][k] = static_cast<std::uint8_t>(fi);
        position_of_facelet[static_cast<std::size_t>(fi)] = p;
      }
    }
    for (auto& row : edge_lookup) row.fill(kNone);
    for (auto& plane : corner_lookup)
      for (auto& row : plane) row.fill(kNone);
    for (int c = 0; c < kNumEdges; ++c) {
      const auto& col = colors[static_cast<std::size_t>(c)];
      edge_lookup[static_cast<std::size_t>(col[0])][static_cast<std::size_t>(col[1])] = static_cast<std::uint8_t>(c << 2 | 0);
      edge_lookup[static_cast<std::size_t>(col[1])][static_cast<std::size_t>(col[0])] = static_cast<std::uint8_t>(c << 2 | 1);
    }
    for (int c = kNumEdges; c < kNumCubelets; ++c) {
      const auto& col = colors[static_cast<std::size_t>(c)];
      for (int t = 0; t < 3; ++t) {
        std::array<Color, 3> seen{};
        for (int i = 0; i < 3; ++i) seen[static_cast<std::size_t>((t + i) % 3)] = col[static_cast<std::size_t>(i)];
        corner_lookup[static_cast<std::size_t>(seen[0])][static_cast<std::size_t>(seen[1])][static_cast<std::size_t>(seen[2])] =
            static_cast<std::uint8_t>(c << 2 | t);
      }
    }
    build_symmetry();
  }

  void build_symmetry() {
    const detail::Vec3 axis = detail::face_normal(Face::U);
    std::array<std::uint8_t, kNumFacelets> one{};
    for (int i = 0; i < kNumFacelets; ++i)
      one[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(detail::facelet_at(
          detail::rotate(detail::facelet_position(i), axis, true), detail::rotate(detail::facelet_normal(i), axis, true)));
    std::array<Face, kNumFaces> face_one{};
    for (int f = 0; f < kNumFaces; ++f)
      face_one[static_cast<std::size_t>(f)] =
          detail::face_of_normal(detail::rotate(detail::face_normal(static_cast<Face>(f)), axis, true));

    for (int i = 0; i < kNumFacelets; ++i) facelet_map[0][static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    for (int f = 0; f < kNumFaces; ++f) face_map[0][static_cast<std::size_t>(f)] = static_cast<Face>(f);
    for (int k = 1; k < kNumFrames; ++k) {
      for (int i = 0; i < kNumFacelets; ++i)
        facelet_map[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
            one[facelet_map[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)]];
      for (int f = 0; f < kNumFaces; ++f)
        face_map[static_cast<std::size_t>(k)][static_cast<std::size_t>(f)] =
            face_one[static_cast<std::size_t>(face_map[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(f)])];
    }
    for (int k = 0; k < kNumFrames; ++k) {
      for (int c = 0; c < kNumColors; ++c)
        color_map[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] =
            home_color(face_map[static_cast<std::size_t>(k)][static_cast<std::size_t>(home_face(static_cast<Color>(c)))]);
      for (int p = 0; p < kNumCubelets; ++p) {
        const int fi = facelet_map[static_cast<std::size_t>(k)][facelets[static_cast<std::size_t>(p)][0]];
        position_map[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] =
            static_cast<std::uint8_t>(position_of_facelet[static_cast<std::size_t>(fi)]);
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

int permutation_parity(const std::array<std::uint8_t, kNumCubelets>& at, int begin, int end) {
  int parity = 0;
  for (int i = begin; i < end; ++i)
    for (int j = i + 1; j < end; ++j)
      if (at[static_cast<std::size_t>(i)] > at[static_cast<std::size_t>(j)]) parity ^= 1;
  return parity;
}

}  // namespace

std::span<const std::uint8_t> position_facelets(int position) {
  const auto& f = tables().facelets[static_cast<std::size_t>(position)];
  return {f.data(), static_cast<std::size_t>(sticker_count(position))};
}

std::span<const Face> position_faces(int position) {
  const auto& f = tables().faces[static_cast<std::size_t>(position)];
  return {f.data(), static_cast<std::size_t>(sticker_count(position))};
}

std::string_view position_code(int position) { return kPositionCodes[static_cast<std::size_t>(position)]; }

std::optional<int> position_from_code(std::string_view code) {
  for (int p = 0; p < kNumCubelets; ++p)
    if (kPositionCodes[static_cast<std::size_t>(p)] == code) return p;
  return std::nullopt;
}

std::span<const Color> cubelet_colors(int cubelet) {
  const auto& c = tables().colors[static_cast<std::size_t>(cubelet)];
  return {c.data(), static_cast<std::size_t>(sticker_count(cubelet))};
}

std::string cubelet_code(int cubelet) {
  std::string s;
  for (Color c : cubelet_colors(cubelet)) s += color_letter(c);
  return s;
}

std::optional<int> cubelet_from_code(std::string_view code) {
  for (int c = 0; c < kNumCubelets; ++c)
    if (cubelet_code(c) == code) return c;
  return std::nullopt;
}

std::string cubelet_name(int cubelet) {
  std::string s;
  for (Color c : cubelet_colors(cubelet)) {
    if (!s.empty()) s += '-';
    s += color_name(c);
  }
  s += is_edge(cubelet) ? " edge" : " corner";
  return s;
}

int position_of_facelet(int facelet) { return tables().position_of_facelet[static_cast<std::size_t>(facelet)]; }

int CubieView::facelet_of(int cubelet, Color c) const {
  const auto colors = cubelet_colors(cubelet);
  const int n = sticker_count(cubelet);
  const auto pos = position_of[static_cast<std::size_t>(cubelet)];
  const auto ori = orient_of[static_cast<std::size_t>(cubelet)];
  for (int i = 0; i < n; ++i)
    if (colors[static_cast<std::size_t>(i)] == c)
      return position_facelets(pos)[static_cast<std::size_t>((ori + i) % n)];
  return -1;
}

std::optional<CubieView> try_locate(const CubeState& state) {
  const Tables& t = tables();
  CubieView v;
  std::array<bool, kNumCubelets> seen{};
  for (int p = 0; p < kNumCubelets; ++p) {
    const auto& f = t.facelets[static_cast<std::size_t>(p)];
    std::uint8_t code = kNone;
    if (is_edge(p)) {
      code = t.edge_lookup[static_cast<std::size_t>(state[f[0]])][static_cast<std::size_t>(state[f[1]])];
    } else {
      code = t.corner_lookup[static_cast<std::size_t>(state[f[0]])][static_cast<std::size_t>(state[f[1]])]
                            [static_cast<std::size_t>(state[f[2]])];
    }
    if (code == kNone) return std::nullopt;
    const int cubelet = code >> 2, ori = code & 3;
    if (seen[static_cast<std::size_t>(cubelet)]) return std::nullopt;
    seen[static_cast<std::size_t>(cubelet)] = true;
    v.cubelet_at[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(cubelet);
    v.orient_at[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(ori);
    v.position_of[static_cast<std::size_t>(cubelet)] = static_cast<std::uint8_t>(p);
    v.orient_of[static_cast<std::size_t>(cubelet)] = static_cast<std::uint8_t>(ori);
  }
  return v;
}

CubieView locate(const CubeState& state) {
  auto v = try_locate(state);
  if (!v) throw std::invalid_argument("state contains an unrecognizable or duplicated cubelet");
  return *v;
}

bool is_placed(const CubeState& state, int cubelet) {
  const auto f = position_facelets(cubelet);
  const auto c = cubelet_colors(cubelet);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (state[f[i]] != c[i]) return false;
  return true;
}

std::vector<Cubelet> cubelet_positions(const CubeState& state) {
  const CubieView v = locate(state);
  std::vector<Cubelet> out;
  out.reserve(kNumCubelets + kNumFaces);
  for (int c = 0; c < kNumCubelets; ++c) {
    const auto colors = cubelet_colors(c);
    out.push_back({is_edge(c) ? CubeletKind::Edge : CubeletKind::Corner, {colors.begin(), colors.end()},
                   v.position_of[static_cast<std::size_t>(c)], c});
  }
  for (int f = 0; f < kNumFaces; ++f)
    out.push_back({CubeletKind::Center, {state[facelet_index(static_cast<Face>(f), kCenterSlot)]}, kNumCubelets + f,
                   kNumCubelets + f});
  return out;
}

bool is_reachable(const CubeState& state) {
  for (int f = 0; f < kNumFaces; ++f)
    if (state[facelet_index(static_cast<Face>(f), kCenterSlot)] != home_color(static_cast<Face>(f))) return false;
  const auto v = try_locate(state);
  if (!v) return false;
  int flips = 0, twists = 0;
  for (int p = 0; p < kNumEdges; ++p) flips += v->orient_at[static_cast<std::size_t>(p)];
  for (int p = kNumEdges; p < kNumCubelets; ++p) twists += v->orient_at[static_cast<std::size_t>(p)];
  if (flips % 2 != 0 || twists % 3 != 0) return false;
  return permutation_parity(v->cubelet_at, 0, kNumEdges) == permutation_parity(v->cubelet_at, kNumEdges, kNumCubelets);
}

CubeState from_cubies(const std::array<std::uint8_t, kNumCubelets>& cubelet_at,
                      const std::array<std::uint8_t, kNumCubelets>& orient_at) {
  CubeState::Facelets f = solved_state().facelets();
  for (int p = 0; p < kNumCubelets; ++p) {
    const int c = cubelet_at[static_cast<std::size_t>(p)];
    const int o = orient_at[static_cast<std::size_t>(p)];
    const int n = sticker_count(p);
    const auto pf = position_facelets(p);
    const auto colors = cubelet_colors(c);
    for (int i = 0; i < n; ++i) f[pf[static_cast<std::size_t>((o + i) % n)]] = colors[static_cast<std::size_t>(i)];
  }
  return CubeState(f);
}

CubeState random_state(std::mt19937_64& rng, std::span<const CubeletPlacement> fixed) {
  std::array<std::uint8_t, kNumCubelets> at{}, ori{};
  std::array<bool, kNumCubelets> position_taken{}, cubelet_taken{};
  for (const auto& fp : fixed) {
    if (is_edge(fp.cubelet) != is_edge(fp.position) || fp.orientation < 0 || fp.orientation >= sticker_count(fp.cubelet))
      throw std::invalid_argument("fixed placement mixes cubelet kinds or has a bad orientation");
    if (position_taken[static_cast<std::size_t>(fp.position)] || cubelet_taken[static_cast<std::size_t>(fp.cubelet)])
      throw std::invalid_argument("fixed placements overlap");
    position_taken[static_cast<std::size_t>(fp.position)] = cubelet_taken[static_cast<std::size_t>(fp.cubelet)] = true;
    at[static_cast<std::size_t>(fp.position)] = static_cast<std::uint8_t>(fp.cubelet);
    ori[static_cast<std::size_t>(fp.position)] = static_cast<std::uint8_t>(fp.orientation);
  }

  std::array<std::vector<int>, 2> free_positions;
  for (int kind = 0; kind < 2; ++kind) {
    const int begin = kind == 0 ? 0 : kNumEdges, end = kind == 0 ? kNumEdges : kNumCubelets, mod = kind == 0 ? 2 : 3;
    std::vector<int> cubelets;
    auto& positions = free_positions[static_cast<std::size_t>(kind)];
    for (int i = begin; i < end; ++i) {
      if (!position_taken[static_cast<std::size_t>(i)]) positions.push_back(i);
      if (!cubelet_taken[static_cast<std::size_t>(i)]) cubelets.push_back(i);
    }
    std::shuffle(cubelets.begin(), cubelets.end(), rng);
    std::uniform_int_distribution<int> pick(0, mod - 1);
    int sum = 0;
    for (int i = begin; i < end; ++i)
      if (position_taken[static_cast<std::size_t>(i)]) sum += ori[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const auto p = static_cast<std::size_t>(positions[k]);
      at[p] = static_cast<std::uint8_t>(cubelets[k]);
      ori[p] = static_cast<std::uint8_t>(pick(rng));
      sum += ori[p];
    }
    if (sum % mod != 0) {
      if (positions.empty()) throw std::invalid_argument("fixed placements violate orientation invariants");
      const auto p = static_cast<std::size_t>(positions.back());
      ori[p] = static_cast<std::uint8_t>((ori[p] + mod - sum % mod) % mod);
    }
  }
  if (permutation_parity(at, 0, kNumEdges) != permutation_parity(at, kNumEdges, kNumCubelets)) {
    const auto& fe = free_positions[0];
    const auto& fc = free_positions[1];
    if (fe.size() >= 2)
      std::swap(at[static_cast<std::size_t>(fe[0])], at[static_cast<std::size_t>(fe[1])]);
    else if (fc.size() >= 2)
      std::swap(at[static_cast<std::size_t>(fc[0])], at[static_cast<std::size_t>(fc[1])]);
    else
      throw std::invalid_argument("fixed placements violate permutation parity");
  }
  return from_cubies(at, ori);
}

CubeState transform_state(const CubeState& state, int frame) {
  const Tables& t = tables();
  const auto& fmap = t.facelet_map[static_cast<std::size_t>(frame)];
  const auto& cmap = t.color_map[static_cast<std::size_t>(frame)];
  CubeState::Facelets out{};
  for (int i = 0; i < kNumFacelets; ++i)
    out[fmap[static_cast<std::size_t>(i)]] = cmap[static_cast<std::size_t>(state[i])];
  return CubeState(out);
}

Move transform_move(Move m, int frame) { return {transform_face(m.face, frame), m.clockwise}; }

MoveSequence transform_moves(const MoveSequence& seq, int frame) {
  MoveSequence out;
  out.reserve(seq.size());
  for (Move m : seq) out.push_back(transform_move(m, frame));
  return out;
}

int transform_facelet(int facelet, int frame) {
  return tables().facelet_map[static_cast<std::size_t>(frame)][static_cast<std::size_t>(facelet)];
}

int transform_position(int position, int frame) {
  return tables().position_map[static_cast<std::size_t>(frame)][static_cast<std::size_t>(position)];
}

Color transform_color(Color c, int frame) {
  return tables().color_map[static_cast<std::size_t>(frame)][static_cast<std::size_t>(c)];
}

Face transform_face(Face f, int frame) {
  return tables().face_map[static_cast<std::size_t>(frame)][static_cast<std::size_t>(f)];
}

}  // namespace cubetutor

#pragma once

// 3D placement of facelets. Axes: x toward R, y toward U, z toward F.
// Internal to the library; move and symmetry tables are derived from it.

#include "cubetutor/cube.hpp"

namespace cubetutor::detail {

struct Vec3 {
  int x = 0, y = 0, z = 0;
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr int dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }

constexpr Vec3 face_normal(Face f) {
  switch (f) {
    case Face::U: return {0, 1, 0};
    case Face::D: return {0, -1, 0};
    case Face::L: return {-1, 0, 0};
    case Face::R: return {1, 0, 0};
    case Face::F: return {0, 0, 1};
    case Face::B: return {0, 0, -1};
  }
  return {};
}

constexpr Face face_of_normal(Vec3 n) {
  for (int f = 0; f < kNumFaces; ++f)
    if (face_normal(static_cast<Face>(f)) == n) return static_cast<Face>(f);
  return Face::U;
}

constexpr Vec3 facelet_position(int facelet) {
  const int r = (facelet % 9) / 3, c = facelet % 3;
  switch (facelet_face(facelet)) {
    case Face::U: return {c - 1, 1, r - 1};
    case Face::D: return {c - 1, -1, 1 - r};
    case Face::L: return {-1, 1 - r, c - 1};
    case Face::R: return {1, 1 - r, 1 - c};
    case Face::F: return {c - 1, 1 - r, 1};
    case Face::B: return {1 - c, 1 - r, -1};
  }
  return {};
}

constexpr Vec3 facelet_normal(int facelet) { return face_normal(facelet_face(facelet)); }

constexpr int facelet_at(Vec3 pos, Vec3 normal) {
  const Face f = face_of_normal(normal);
  int r = 0, c = 0;
  switch (f) {
    case Face::U: r = pos.z + 1; c = pos.x + 1; break;
    case Face::D: r = 1 - pos.z; c = pos.x + 1; break;
    case Face::L: r = 1 - pos.y; c = pos.z + 1; break;
    case Face::R: r = 1 - pos.y; c = 1 - pos.z; break;
    case Face::F: r = 1 - pos.y; c = pos.x + 1; break;
    case Face::B: r = 1 - pos.y; c = 1 - pos.x; break;
  }
  return facelet_index(f, r * 3 + c);
}

/// Quarter turn about a unit axis; clockwise as seen from the +axis side.
constexpr Vec3 rotate(Vec3 v, Vec3 axis, bool clockwise) {
  const Vec3 ax = cross(axis, v);
  const int along = dot(axis, v);
  const int s = clockwise ? -1 : 1;
  return {s * ax.x + axis.x * along, s * ax.y + axis.y * along, s * ax.z + axis.z * along};
}

}  // namespace cubetutor::detail

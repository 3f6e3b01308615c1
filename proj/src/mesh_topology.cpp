#include <cstdint>
#include <unordered_map>

#include "mswm/errors.hpp"
#include "mswm/mesh.hpp"

namespace mswm {

namespace {

Triangulation base_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double s = 1.0 / std::sqrt(1.0 + phi * phi);
  const double a = s, b = phi * s;

  Triangulation t;
  t.points = {
      {-a, b, 0}, {a, b, 0}, {-a, -b, 0}, {a, -b, 0},
      {0, -a, b}, {0, a, b}, {0, -a, -b}, {0, a, -b},
      {b, 0, -a}, {b, 0, a}, {-b, 0, -a}, {-b, 0, a},
  };
  t.tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  // Make sure every face winds counterclockwise seen from outside.
  for (auto& f : t.tris) {
    const Vec3 &p0 = t.points[f[0]], &p1 = t.points[f[1]], &p2 = t.points[f[2]];
    if (dot(p0, cross(p1 - p0, p2 - p0)) < 0.0) std::swap(f[1], f[2]);
  }
  return t;
}

}  // namespace

Triangulation subdivide_icosahedron(int level) {
  Triangulation t = base_icosahedron();
  for (int l = 0; l < level; ++l) {
    std::unordered_map<uint64_t, int> midpoint;
    midpoint.reserve(t.tris.size() * 2);
    auto mid = [&](int i, int j) {
      uint64_t key = (uint64_t(std::min(i, j)) << 32) | uint64_t(std::max(i, j));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int id = int(t.points.size());
      t.points.push_back(normalized(t.points[i] + t.points[j]));
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(t.tris.size() * 4);
    for (const auto& f : t.tris) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    t.tris = std::move(next);
  }
  return t;
}

}  // namespace mswm

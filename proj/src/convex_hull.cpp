#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mswm/errors.hpp"
#include "mswm/mesh.hpp"

// Quickhull over points on the unit sphere. Every generator must come out
// as a hull vertex; a point swallowed by the hull (duplicate or within
// tolerance of cospherical neighbors) has no Voronoi cell and is reported
// as a topology error.

namespace mswm {

namespace {

constexpr double kVisibleEps = 1e-11;

struct HullFace {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[k] is across edge (v[k], v[k+1])
  Vec3 normal;            // unit
  double offset;          // dot(normal, v[0])
  bool alive = true;
  std::vector<int> outside;
};

double face_dist(const HullFace& f, const Vec3& p) {
  return dot(f.normal, p) - f.offset;
}

void set_plane(HullFace& f, const std::vector<Vec3>& pts) {
  const Vec3 &a = pts[f.v[0]], &b = pts[f.v[1]], &c = pts[f.v[2]];
  f.normal = normalized(cross(b - a, c - a));
  f.offset = dot(f.normal, a);
}

int slot_of_edge(const HullFace& f, int a, int b) {
  for (int k = 0; k < 3; ++k)
    if (f.v[k] == a && f.v[(k + 1) % 3] == b) return k;
  return -1;
}

}  // namespace

Triangulation triangulate_sphere_points(std::vector<Vec3> points) {
  const int n = int(points.size());
  if (n < 4) throw TopologyError("need at least 4 generators, got " + std::to_string(n));

  // Initial tetrahedron from extreme points.
  int i0 = 0, i1 = 0;
  for (int i = 1; i < n; ++i) {
    if (points[i].x < points[i0].x) i0 = i;
    if (points[i].x > points[i1].x) i1 = i;
  }
  if (i0 == i1) throw TopologyError("generators are degenerate (all at one x)");
  Vec3 axis = points[i1] - points[i0];
  int i2 = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec3 d = points[i] - points[i0];
    double h = norm(cross(axis, d));
    if (h > best) { best = h; i2 = i; }
  }
  if (i2 < 0 || best < 1e-12) throw TopologyError("generators are collinear");
  Vec3 pn = cross(points[i1] - points[i0], points[i2] - points[i0]);
  int i3 = -1;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    double h = std::abs(dot(pn, points[i] - points[i0]));
    if (h > best) { best = h; i3 = i; }
  }
  if (i3 < 0 || best < 1e-12) throw TopologyError("generators are coplanar");
  if (dot(pn, points[i3] - points[i0]) > 0.0) std::swap(i1, i2);

  std::vector<HullFace> faces;
  auto add_face = [&](int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    f.nb = {-1, -1, -1};
    set_plane(f, points);
    faces.push_back(std::move(f));
    return int(faces.size()) - 1;
  };
  // Tetra (i0,i1,i2,i3) with i3 on the negative side of (i0,i1,i2).
  add_face(i0, i1, i2);
  add_face(i1, i0, i3);
  add_face(i2, i1, i3);
  add_face(i0, i2, i3);
  auto link = [&](int fa, int fb) {
    for (int k = 0; k < 3; ++k) {
      int a = faces[fa].v[k], b = faces[fa].v[(k + 1) % 3];
      int s = slot_of_edge(faces[fb], b, a);
      if (s >= 0) { faces[fa].nb[k] = fb; faces[fb].nb[s] = fa; }
    }
  };
  for (int fa = 0; fa < 4; ++fa)
    for (int fb = fa + 1; fb < 4; ++fb) link(fa, fb);

  std::vector<char> used(n, 0);
  used[i0] = used[i1] = used[i2] = used[i3] = 1;

  auto assign_point = [&](int p, const std::vector<int>& candidates) {
    int bestf = -1;
    double bestd = kVisibleEps;
    for (int fi : candidates) {
      if (!faces[fi].alive) continue;
      double d = face_dist(faces[fi], points[p]);
      if (d > bestd) { bestd = d; bestf = fi; }
    }
    if (bestf >= 0) faces[bestf].outside.push_back(p);
  };
  std::vector<int> initial = {0, 1, 2, 3};
  for (int p = 0; p < n; ++p)
    if (!used[p]) assign_point(p, initial);

  std::vector<int> stack;
  for (int fi = 0; fi < 4; ++fi)
    if (!faces[fi].outside.empty()) stack.push_back(fi);

  std::vector<int> visible, horizon_scratch;
  while (!stack.empty()) {
    int fi = stack.back();
    stack.pop_back();
    if (!faces[fi].alive || faces[fi].outside.empty()) continue;

    // Farthest outside point of this face.
    int p = -1;
    double bestd = -1.0;
    for (int q : faces[fi].outside) {
      double d = face_dist(faces[fi], points[q]);
      if (d > bestd) { bestd = d; p = q; }
    }

    // Visible region (DFS) and its horizon.
    visible.clear();
    visible.push_back(fi);
    std::vector<char> in_visible(faces.size(), 0);
    in_visible[fi] = 1;
    for (size_t head = 0; head < visible.size(); ++head) {
      int f = visible[head];
      for (int k = 0; k < 3; ++k) {
        int g = faces[f].nb[k];
        if (g < 0 || in_visible[g] || !faces[g].alive) continue;
        if (face_dist(faces[g], points[p]) > kVisibleEps) {
          in_visible[g] = 1;
          visible.push_back(g);
        }
      }
    }
    struct HorizonEdge { int a, b, outer; };
    std::vector<HorizonEdge> edges;
    for (int f : visible)
      for (int k = 0; k < 3; ++k) {
        int g = faces[f].nb[k];
        if (g >= 0 && !in_visible[g])
          edges.push_back({faces[f].v[k], faces[f].v[(k + 1) % 3], g});
      }
    if (edges.size() < 3)
      throw TopologyError("degenerate hull horizon near generator " + std::to_string(p));
    std::unordered_map<int, int> next_from;  // start vertex -> edge index
    for (int k = 0; k < int(edges.size()); ++k) {
      if (!next_from.emplace(edges[k].a, k).second)
        throw TopologyError("hull horizon is not a simple cycle near generator " +
                            std::to_string(p));
    }
    horizon_scratch.clear();
    int cur = 0;
    for (size_t k = 0; k < edges.size(); ++k) {
      horizon_scratch.push_back(cur);
      auto it = next_from.find(edges[cur].b);
      if (it == next_from.end())
        throw TopologyError("hull horizon is broken near generator " + std::to_string(p));
      cur = it->second;
    }
    if (cur != 0)
      throw TopologyError("hull horizon does not close near generator " + std::to_string(p));

    // New fan of faces around p.
    used[p] = 1;
    std::vector<int> fresh;
    fresh.reserve(horizon_scratch.size());
    for (int ei : horizon_scratch) fresh.push_back(add_face(edges[ei].a, edges[ei].b, p));
    int m = int(fresh.size());
    for (int k = 0; k < m; ++k) {
      const HorizonEdge& he = edges[horizon_scratch[k]];
      HullFace& nf = faces[fresh[k]];
      nf.nb[0] = he.outer;
      nf.nb[1] = fresh[(k + 1) % m];
      nf.nb[2] = fresh[(k + m - 1) % m];
      int s = slot_of_edge(faces[he.outer], he.b, he.a);
      if (s < 0) throw TopologyError("hull adjacency mismatch near generator " +
                                     std::to_string(p));
      faces[he.outer].nb[s] = fresh[k];
    }

    // Retire visible faces, reassign their outside points to the new fan.
    std::vector<int> orphans;
    for (int f : visible) {
      faces[f].alive = false;
      for (int q : faces[f].outside)
        if (!used[q]) orphans.push_back(q);
      faces[f].outside.clear();
    }
    std::sort(orphans.begin(), orphans.end());
    orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
    for (int q : orphans) assign_point(q, fresh);
    for (int f : fresh)
      if (!faces[f].outside.empty()) stack.push_back(f);
  }

  Triangulation out;
  out.points = std::move(points);
  for (const auto& f : faces)
    if (f.alive) out.tris.push_back(f.v);
  std::vector<char> seen(n, 0);
  for (const auto& t : out.tris)
    for (int v : t) seen[v] = 1;
  for (int p = 0; p < n; ++p)
    if (!seen[p])
      throw TopologyError("generator " + std::to_string(p) +
                          " has no Voronoi cell (degenerate generator set)");
  return out;
}

}  // namespace mswm

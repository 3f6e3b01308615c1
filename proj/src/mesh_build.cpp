#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "mswm/errors.hpp"
#include "mswm/mesh.hpp"

namespace mswm {

namespace {

uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (uint64_t(a) << 32) | uint64_t(b);
}

// splitmix64; used for deterministic thinning/jitter of generator sets.
uint64_t hash_u64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double hash01(uint64_t x) {
  return double(hash_u64(x) >> 11) * 0x1.0p-53;
}

// Per-generator counterclockwise fan: neighbor generators and the triangle
// between consecutive neighbors. Shared by the dualizer and Lloyd passes.
struct CellFans {
  std::vector<int> offset;     // n_points + 1
  std::vector<int> neighbor;   // CCW neighbor ring
  std::vector<int> triangle;   // triangle between neighbor[j] and neighbor[j+1]
};

CellFans build_fans(const Triangulation& tri) {
  const int n = int(tri.points.size());
  std::vector<int> degree(n, 0);
  for (const auto& t : tri.tris)
    for (int v : t) ++degree[v];

  CellFans fans;
  fans.offset.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) fans.offset[i + 1] = fans.offset[i] + degree[i];
  fans.neighbor.assign(fans.offset[n], -1);
  fans.triangle.assign(fans.offset[n], -1);

  // successor[slot] = (p, q, t): triangle t = (i, p, q) in cyclic order.
  std::vector<std::array<int, 3>> succ(fans.offset[n]);
  std::vector<int> fill(n, 0);
  for (int t = 0; t < int(tri.tris.size()); ++t) {
    const auto& f = tri.tris[t];
    for (int k = 0; k < 3; ++k) {
      int i = f[k], p = f[(k + 1) % 3], q = f[(k + 2) % 3];
      succ[fans.offset[i] + fill[i]++] = {p, q, t};
    }
  }

  for (int i = 0; i < n; ++i) {
    int m = degree[i];
    if (m < 3)
      throw TopologyError("degenerate Voronoi cell " + std::to_string(i) +
                          " (fewer than 3 edges)");
    auto* s = succ.data() + fans.offset[i];
    int start = s[0][0];
    for (int k = 1; k < m; ++k) start = std::min(start, s[k][0]);
    int cur = start;
    for (int j = 0; j < m; ++j) {
      int found = -1;
      for (int k = 0; k < m; ++k)
        if (s[k][0] == cur) { found = k; break; }
      if (found < 0)
        throw TopologyError("non-manifold fan around cell " + std::to_string(i));
      fans.neighbor[fans.offset[i] + j] = cur;
      fans.triangle[fans.offset[i] + j] = s[found][2];
      cur = s[found][1];
    }
    if (cur != start)
      throw TopologyError("fan around cell " + std::to_string(i) + " does not close");
  }
  return fans;
}

// One density-weighted Lloyd pass: move every generator toward the centroid
// of its Voronoi cell (approximated by a fan over triangle circumcenters).
std::vector<Vec3> lloyd_pass(const Triangulation& tri, const CellFans& fans,
                             const std::function<double(const Vec3&)>& density) {
  const int n = int(tri.points.size());
  std::vector<Vec3> circum(tri.tris.size());
  for (int t = 0; t < int(tri.tris.size()); ++t) {
    const auto& f = tri.tris[t];
    Vec3 c = cross(tri.points[f[1]] - tri.points[f[0]],
                   tri.points[f[2]] - tri.points[f[0]]);
    double len = norm(c);
    if (len < 1e-15)
      throw GeometryError("degenerate triangle " + std::to_string(t) +
                          " while relaxing generators");
    c = c * (1.0 / len);
    if (dot(c, tri.points[f[0]] + tri.points[f[1]] + tri.points[f[2]]) < 0.0)
      c = c * -1.0;
    circum[t] = c;
  }

  std::vector<Vec3> out(n);
  for (int i = 0; i < n; ++i) {
    int m = fans.offset[i + 1] - fans.offset[i];
    const int* tids = fans.triangle.data() + fans.offset[i];
    Vec3 acc{0, 0, 0};
    for (int j = 0; j < m; ++j) {
      const Vec3& a = circum[tids[j]];
      const Vec3& b = circum[tids[(j + 1) % m]];
      double area = spherical_triangle_area(tri.points[i], a, b);
      Vec3 g = normalized(tri.points[i] + a + b);
      acc += g * (area * density(g));
    }
    double len = norm(acc);
    out[i] = len > 1e-14 ? acc * (1.0 / len) : tri.points[i];
  }
  return out;
}

double base_spacing(int level) {
  // Icosahedron edge arc is atan(2) ~ 1.1071 rad; halves per level.
  return 1.1071487177940904 / double(1 << level);
}

}  // namespace

void rebuild_edge_stencil(VoronoiMesh& m) {
  // Edges of both cells of e, each ring walked CCW starting just after e.
  m.edge_edge_offset.assign(m.n_edges + 1, 0);
  for (int e = 0; e < m.n_edges; ++e)
    m.edge_edge_offset[e + 1] = m.edge_edge_offset[e] +
                                m.ring_size(m.edge_cells[e][0]) +
                                m.ring_size(m.edge_cells[e][1]) - 2;
  m.edge_edges.assign(m.edge_edge_offset[m.n_edges], -1);
  for (int e = 0; e < m.n_edges; ++e) {
    int pos = m.edge_edge_offset[e];
    for (int side = 0; side < 2; ++side) {
      int i = m.edge_cells[e][side];
      auto ring = m.ring_edges(i);
      int mm = int(ring.size());
      int p = int(std::find(ring.begin(), ring.end(), e) - ring.begin());
      if (p == mm)
        throw TopologyError("edge " + std::to_string(e) + " missing from ring of cell " +
                            std::to_string(i));
      for (int k = 1; k < mm; ++k) m.edge_edges[pos++] = ring[(p + k) % mm];
    }
  }
}

void assign_orientation_signs(VoronoiMesh& m) {
  m.edge_cell_sign.resize(m.n_edges);
  m.edge_vertex_sign.resize(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e) {
    m.edge_cell_sign[e] = {-1, +1};  // normal points from the higher id cell to the lower
    // Walking counterclockwise around the lower cell crosses e against the
    // tangent, so the ring vertex just after e marks the -tangent end. The
    // winding decides the sign, which keeps orientation well defined even
    // when an obtuse triangle pair drops both circumcenters on one side of
    // the crossing point.
    const int c0 = m.edge_cells[e][0];
    const int off = m.cell_offset[c0];
    auto ring = m.ring_edges(c0);
    const int p = int(std::find(ring.begin(), ring.end(), e) - ring.begin());
    if (p == int(ring.size()))
      throw TopologyError("edge " + std::to_string(e) + " missing from ring of cell " +
                          std::to_string(c0));
    const int after = m.cell_vertices[off + p];
    if (after == m.edge_vertices[e][0]) {
      m.edge_vertex_sign[e] = {-1, +1};
    } else if (after == m.edge_vertices[e][1]) {
      m.edge_vertex_sign[e] = {+1, -1};
    } else {
      throw TopologyError("edge " + std::to_string(e) +
                          " ring vertex does not match its endpoints");
    }
  }
}

VoronoiMesh build_voronoi_mesh(const Triangulation& tri, double radius) {
  if (radius <= 0.0) throw ConfigError("sphere radius must be positive");
  VoronoiMesh m;
  m.n_cells = int(tri.points.size());
  m.n_vertices = int(tri.tris.size());
  m.sphere_radius = radius;
  m.cell_xyz.resize(m.n_cells);
  for (int i = 0; i < m.n_cells; ++i) m.cell_xyz[i] = normalized(tri.points[i]);

  // Edges from triangle sides.
  std::unordered_map<uint64_t, int> edge_of;
  edge_of.reserve(tri.tris.size() * 2);
  m.edge_cells.clear();
  m.edge_vertices.clear();
  for (int t = 0; t < m.n_vertices; ++t) {
    const auto& f = tri.tris[t];
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a == b || a < 0 || a >= m.n_cells || b < 0 || b >= m.n_cells)
        throw TopologyError("triangle " + std::to_string(t) + " has invalid corners");
      auto [it, fresh] = edge_of.try_emplace(pair_key(a, b), int(m.edge_cells.size()));
      if (fresh) {
        m.edge_cells.push_back({std::min(a, b), std::max(a, b)});
        m.edge_vertices.push_back({t, -1});
      } else {
        auto& ev = m.edge_vertices[it->second];
        if (ev[1] != -1)
          throw TopologyError("edge between cells " + std::to_string(a) + " and " +
                              std::to_string(b) + " borders more than 2 triangles");
        ev[1] = t;
      }
    }
  }
  m.n_edges = int(m.edge_cells.size());
  for (int e = 0; e < m.n_edges; ++e) {
    if (m.edge_vertices[e][1] == -1)
      throw TopologyError("edge " + std::to_string(e) + " is open (mesh not closed)");
    if (m.edge_vertices[e][0] > m.edge_vertices[e][1])
      std::swap(m.edge_vertices[e][0], m.edge_vertices[e][1]);
  }
  if (m.n_edges != m.n_cells + m.n_vertices - 2)
    throw TopologyError("Euler identity violated: " + std::to_string(m.n_edges) +
                        " edges for " + std::to_string(m.n_cells) + " cells and " +
                        std::to_string(m.n_vertices) + " vertices");

  // Cell rings from the fan walk.
  CellFans fans = build_fans(tri);
  m.cell_offset = fans.offset;
  int total = m.cell_offset[m.n_cells];
  m.cell_edges.resize(total);
  m.cell_vertices.resize(total);
  m.cell_cells.resize(total);
  for (int i = 0; i < m.n_cells; ++i) {
    int off = m.cell_offset[i], mm = m.ring_size(i);
    for (int j = 0; j < mm; ++j) {
      int p = fans.neighbor[off + j];
      auto it = edge_of.find(pair_key(i, p));
      if (it == edge_of.end())
        throw TopologyError("missing edge between cells " + std::to_string(i) +
                            " and " + std::to_string(p));
      m.cell_cells[off + j] = p;
      m.cell_edges[off + j] = it->second;
      m.cell_vertices[off + j] = fans.triangle[off + j];
    }
  }

  // Vertex tables from the triangles, rotated so the smallest cell id leads
  // (the canonical form a mesh loader can reproduce without the triangles).
  m.vertex_cells.resize(m.n_vertices);
  m.vertex_edges.resize(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v) {
    std::array<int, 3> f = tri.tris[v];
    while (f[0] > f[1] || f[0] > f[2]) f = {f[1], f[2], f[0]};
    m.vertex_cells[v] = f;
    for (int k = 0; k < 3; ++k)
      m.vertex_edges[v][k] = edge_of.at(pair_key(f[k], f[(k + 1) % 3]));
  }

  rebuild_edge_stencil(m);

  // Geometry. Vertices are circumcenters; edge points are the intersection
  // of the Voronoi edge arc with the Delaunay edge arc.
  const double R = radius, R2 = radius * radius;
  m.vertex_xyz.resize(m.n_vertices);
  m.vertex_area.resize(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v) {
    const Vec3& a = m.cell_xyz[m.vertex_cells[v][0]];
    const Vec3& b = m.cell_xyz[m.vertex_cells[v][1]];
    const Vec3& c = m.cell_xyz[m.vertex_cells[v][2]];
    Vec3 cc = cross(b - a, c - a);
    double len = norm(cc);
    if (len < 1e-15)
      throw GeometryError("vertex " + std::to_string(v) + " has a degenerate circumcenter");
    cc = cc * (1.0 / len);
    if (dot(cc, a + b + c) < 0.0) cc = cc * -1.0;
    m.vertex_xyz[v] = cc;
    double area = spherical_triangle_area(a, b, c) * R2;
    if (!(area > 0.0))
      throw GeometryError("vertex " + std::to_string(v) + " has non-positive area");
    m.vertex_area[v] = area;
  }

  m.edge_xyz.resize(m.n_edges);
  m.edge_len.resize(m.n_edges);
  m.edge_dual_len.resize(m.n_edges);
  m.edge_cell_sign.resize(m.n_edges);
  m.edge_vertex_sign.resize(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e) {
    const Vec3& c0 = m.cell_xyz[m.edge_cells[e][0]];
    const Vec3& c1 = m.cell_xyz[m.edge_cells[e][1]];
    const Vec3& v0 = m.vertex_xyz[m.edge_vertices[e][0]];
    const Vec3& v1 = m.vertex_xyz[m.edge_vertices[e][1]];
    m.edge_xyz[e] = arc_intersection(c0, c1, v0, v1);
    m.edge_len[e] = arc_angle(v0, v1) * R;
    m.edge_dual_len[e] = arc_angle(c0, c1) * R;
    if (!(m.edge_len[e] > R * 1e-14))
      throw GeometryError("edge " + std::to_string(e) + " has zero length");
    if (!(m.edge_dual_len[e] > R * 1e-14))
      throw GeometryError("edge " + std::to_string(e) + " has zero dual length");
  }
  assign_orientation_signs(m);

  // Kites and cell areas. A cell's area is the sum of its kites by
  // construction; each kite is the quad (center, edge point, vertex,
  // next edge point) split into two spherical triangles.
  m.kite_area.assign(total, 0.0);
  m.cell_area.assign(m.n_cells, 0.0);
  for (int i = 0; i < m.n_cells; ++i) {
    int off = m.cell_offset[i], mm = m.ring_size(i);
    const Vec3& xi = m.cell_xyz[i];
    double acc = 0.0;
    for (int j = 0; j < mm; ++j) {
      const Vec3& xe = m.edge_xyz[m.cell_edges[off + j]];
      const Vec3& xv = m.vertex_xyz[m.cell_vertices[off + j]];
      const Vec3& xe1 = m.edge_xyz[m.cell_edges[off + (j + 1) % mm]];
      double kite = (spherical_triangle_area(xi, xe, xv) +
                     spherical_triangle_area(xi, xv, xe1)) * R2;
      m.kite_area[off + j] = kite;
      acc += kite;
    }
    if (!(acc > 0.0))
      throw GeometryError("cell " + std::to_string(i) + " has non-positive area");
    m.cell_area[i] = acc;
  }

  m.vertex_kite.resize(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v) {
    for (int k = 0; k < 3; ++k) {
      int i = m.vertex_cells[v][k];
      auto ring = m.ring_vertices(i);
      int slot = int(std::find(ring.begin(), ring.end(), v) - ring.begin());
      if (slot == int(ring.size()))
        throw TopologyError("vertex " + std::to_string(v) + " missing from ring of cell " +
                            std::to_string(i));
      m.vertex_kite[v][k] = m.kite_area[m.cell_offset[i] + slot];
    }
  }

  // Perpendicular-flux weights, one per EE entry. Walking CCW from e
  // through a cell, the kite fractions accumulate over the vertices crossed
  // between e' and e; the anchor vertex is the one just after e.
  m.edge_weight.assign(m.edge_edges.size(), 0.0);
  for (int e = 0; e < m.n_edges; ++e) {
    int pos = m.edge_edge_offset[e];
    for (int side = 0; side < 2; ++side) {
      int i = m.edge_cells[e][side];
      int off = m.cell_offset[i], mm = m.ring_size(i);
      auto ring = m.ring_edges(i);
      int p = int(std::find(ring.begin(), ring.end(), e) - ring.begin());
      double anchor = m.vertex_sign(e, m.cell_vertices[off + p]);
      double frac = 0.0;
      for (int k = 1; k < mm; ++k) {
        frac += m.kite_area[off + (p + k - 1) % mm] / m.cell_area[i];
        int ep = ring[(p + k) % mm];
        m.edge_weight[pos++] = m.cell_sign(ep, i) * anchor * (frac - 0.5);
      }
    }
  }

  validate_mesh(m);
  return m;
}

VoronoiMesh generate_icosphere_mesh(int level, int lloyd_iterations, double radius) {
  level = std::clamp(level, 0, 7);
  lloyd_iterations = std::clamp(lloyd_iterations, 0, 200);
  Triangulation tri = subdivide_icosahedron(level);
  if (lloyd_iterations > 0) {
    CellFans fans = build_fans(tri);
    auto uniform = [](const Vec3&) { return 1.0; };
    for (int it = 0; it < lloyd_iterations; ++it)
      tri.points = lloyd_pass(tri, fans, uniform);
  }
  return build_voronoi_mesh(tri, radius);
}

VoronoiMesh generate_refined_mesh(int level, const Vec3& center, double refine_radius,
                                  int refine_factor, int lloyd_iterations, double radius) {
  refine_factor = std::clamp(refine_factor, 1, 8);
  if (refine_factor == 1) return generate_icosphere_mesh(level, lloyd_iterations, radius);
  if (!(refine_radius > 0.0) || refine_radius > M_PI / 2)
    throw ConfigError("refine_radius must be in (0, pi/2]");
  lloyd_iterations = std::clamp(lloyd_iterations, 0, 200);

  int extra = 0;
  while ((1 << extra) < refine_factor) ++extra;
  level = std::clamp(level, 0, 8 - extra);
  const int fine_level = level + extra;
  const Vec3 c = normalized(center);
  const double r0 = refine_radius;
  const double band = std::max(2.5 * base_spacing(level), 0.55 * r0);
  const double r_cut = std::min(r0 + band, M_PI - 0.3);
  const double f = double(refine_factor);

  // Diameter ratio f inside r0, cosine-graded to 1 across the band.
  auto shape = [&](double s) {
    if (s <= r0) return 1.0;
    if (s >= r_cut) return 0.0;
    return 0.5 * (1.0 + std::cos(M_PI * (s - r0) / (r_cut - r0)));
  };
  auto diam_ratio = [&](double s) { return 1.0 + (f - 1.0) * shape(s); };

  std::vector<Vec3> pts;
  Triangulation coarse = subdivide_icosahedron(level);
  for (const Vec3& p : coarse.points)
    if (arc_angle(p, c) > r_cut) pts.push_back(p);
  Triangulation fine = subdivide_icosahedron(fine_level);
  const double natural = double(1 << (2 * extra));  // fine/coarse density ratio
  uint64_t salt = uint64_t(level) * 1315423911u + uint64_t(refine_factor) * 2654435761u;
  for (int k = 0; k < int(fine.points.size()); ++k) {
    double s = arc_angle(fine.points[k], c);
    if (s > r_cut) continue;
    double dr = diam_ratio(s);
    if (hash01(salt ^ uint64_t(k)) > dr * dr / natural) continue;
    pts.push_back(fine.points[k]);
  }

  // Deterministic tangential jitter breaks cospherical ties for the hull.
  for (int k = 0; k < int(pts.size()); ++k) {
    double s = arc_angle(pts[k], c);
    double h = base_spacing(level) / diam_ratio(s);
    Vec3 ref = std::abs(pts[k].z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 t1 = normalized(cross(pts[k], ref));
    Vec3 t2 = cross(pts[k], t1);
    double a1 = hash01(salt ^ (0x517cc1b727220a95ull + 2 * k)) - 0.5;
    double a2 = hash01(salt ^ (0x2545f4914f6cdd1dull + 2 * k)) - 0.5;
    pts[k] = normalized(pts[k] + t1 * (0.1 * h * a1) + t2 * (0.1 * h * a2));
  }

  auto density = [&](const Vec3& p) {
    double dr = diam_ratio(arc_angle(p, c));
    return dr * dr * dr * dr;
  };
  Triangulation tri = triangulate_sphere_points(std::move(pts));
  for (int it = 0; it < lloyd_iterations; ++it) {
    CellFans fans = build_fans(tri);
    std::vector<Vec3> moved = lloyd_pass(tri, fans, density);
    tri = triangulate_sphere_points(std::move(moved));
  }
  return build_voronoi_mesh(tri, radius);
}

void validate_mesh(const VoronoiMesh& m) {
  auto fail = [](const std::string& msg) { throw TopologyError(msg); };
  if (m.n_cells < 4 || m.n_vertices < 4 || m.n_edges < 6) fail("mesh too small");
  if (m.n_edges != m.n_cells + m.n_vertices - 2)
    fail("Euler identity violated");
  if (int(m.cell_offset.size()) != m.n_cells + 1) fail("bad cell_offset size");
  int total = m.cell_offset[m.n_cells];
  if (int(m.cell_edges.size()) != total || int(m.cell_vertices.size()) != total ||
      int(m.cell_cells.size()) != total || int(m.kite_area.size()) != total)
    fail("bad ring table size");
  if (total != 2 * m.n_edges || total != 3 * m.n_vertices)
    fail("ring incidences disagree with edge/vertex counts");

  for (int i = 0; i < m.n_cells; ++i) {
    if (m.ring_size(i) < 3)
      fail("degenerate Voronoi cell " + std::to_string(i) + " (fewer than 3 edges)");
    for (int j = m.cell_offset[i]; j < m.cell_offset[i + 1]; ++j) {
      if (m.cell_edges[j] < 0 || m.cell_edges[j] >= m.n_edges ||
          m.cell_vertices[j] < 0 || m.cell_vertices[j] >= m.n_vertices ||
          m.cell_cells[j] < 0 || m.cell_cells[j] >= m.n_cells)
        fail("cell " + std::to_string(i) + " has out-of-range ring entries");
    }
  }
  for (int e = 0; e < m.n_edges; ++e) {
    auto [c0, c1] = m.edge_cells[e];
    auto [v0, v1] = m.edge_vertices[e];
    if (c0 < 0 || c1 >= m.n_cells || c0 >= c1)
      fail("edge " + std::to_string(e) + " has invalid cells");
    if (v0 < 0 || v1 >= m.n_vertices || v0 >= v1)
      fail("edge " + std::to_string(e) + " has invalid vertices");
    if (m.edge_cell_sign[e][0] != -1 || m.edge_cell_sign[e][1] != +1)
      fail("edge " + std::to_string(e) + " breaks the normal sign convention");
    if (m.edge_vertex_sign[e][0] * m.edge_vertex_sign[e][1] != -1)
      fail("edge " + std::to_string(e) + " breaks the tangent sign convention");
    auto ring0 = m.ring_edges(c0);
    auto ring1 = m.ring_edges(c1);
    if (std::find(ring0.begin(), ring0.end(), e) == ring0.end() ||
        std::find(ring1.begin(), ring1.end(), e) == ring1.end())
      fail("edge " + std::to_string(e) + " missing from its cell rings");
    int want = m.ring_size(c0) + m.ring_size(c1) - 2;
    if (m.edge_edge_offset[e + 1] - m.edge_edge_offset[e] != want)
      fail("edge " + std::to_string(e) + " has a bad perpendicular stencil size");
  }
  for (int v = 0; v < m.n_vertices; ++v) {
    for (int k = 0; k < 3; ++k) {
      int e = m.vertex_edges[v][k];
      if (e < 0 || e >= m.n_edges) fail("vertex " + std::to_string(v) + " bad edge id");
      if (m.edge_vertices[e][0] != v && m.edge_vertices[e][1] != v)
        fail("vertex " + std::to_string(v) + " not on its edge " + std::to_string(e));
    }
  }

  const double R2 = m.sphere_radius * m.sphere_radius;
  double area_sum = 0.0, vert_sum = 0.0;
  for (int i = 0; i < m.n_cells; ++i) {
    if (!(m.cell_area[i] > 0.0))
      throw GeometryError("cell " + std::to_string(i) + " has non-positive area");
    area_sum += m.cell_area[i];
  }
  for (int v = 0; v < m.n_vertices; ++v) {
    if (!(m.vertex_area[v] > 0.0))
      throw GeometryError("vertex " + std::to_string(v) + " has non-positive area");
    vert_sum += m.vertex_area[v];
  }
  for (int e = 0; e < m.n_edges; ++e) {
    if (!(m.edge_len[e] > 0.0))
      throw GeometryError("edge " + std::to_string(e) + " has non-positive length");
    if (!(m.edge_dual_len[e] > 0.0))
      throw GeometryError("edge " + std::to_string(e) + " has non-positive dual length");
  }
  const double sphere = 4.0 * M_PI * R2;
  if (std::abs(area_sum - sphere) > 1e-8 * sphere)
    throw GeometryError("cell areas do not close the sphere");
  if (std::abs(vert_sum - sphere) > 1e-8 * sphere)
    throw GeometryError("vertex areas do not close the sphere");
}

}  // namespace mswm

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mswm/errors.hpp"
#include "mswm/geometry.hpp"
#include "mswm/mesh.hpp"
#include "oracles.hpp"

using namespace mswm;

namespace {

// The twelve icosahedron vertices, built here from the golden ratio so the
// expected dodecahedral mesh quantities come from an independent source.
std::vector<Vec3> icosahedron_points() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts;
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0}) {
      pts.push_back(normalized({0.0, s1, s2 * phi}));
      pts.push_back(normalized({s1, s2 * phi, 0.0}));
      pts.push_back(normalized({s2 * phi, 0.0, s1}));
    }
  return pts;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

bool same_mesh_bits(const VoronoiMesh& a, const VoronoiMesh& b) {
  auto veq = [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return false;
    return std::memcmp(x.data(), y.data(), x.size() * sizeof(x[0])) == 0;
  };
  return a.n_cells == b.n_cells && a.n_edges == b.n_edges &&
         a.n_vertices == b.n_vertices && a.sphere_radius == b.sphere_radius &&
         veq(a.cell_xyz, b.cell_xyz) && veq(a.vertex_xyz, b.vertex_xyz) &&
         veq(a.edge_xyz, b.edge_xyz) && veq(a.cell_offset, b.cell_offset) &&
         veq(a.cell_edges, b.cell_edges) && veq(a.cell_vertices, b.cell_vertices) &&
         veq(a.cell_cells, b.cell_cells) && veq(a.edge_cells, b.edge_cells) &&
         veq(a.edge_vertices, b.edge_vertices) && veq(a.vertex_cells, b.vertex_cells) &&
         veq(a.vertex_edges, b.vertex_edges) && veq(a.edge_edge_offset, b.edge_edge_offset) &&
         veq(a.edge_edges, b.edge_edges) && veq(a.edge_len, b.edge_len) &&
         veq(a.edge_dual_len, b.edge_dual_len) && veq(a.cell_area, b.cell_area) &&
         veq(a.vertex_area, b.vertex_area) && veq(a.kite_area, b.kite_area) &&
         veq(a.vertex_kite, b.vertex_kite) && veq(a.edge_cell_sign, b.edge_cell_sign) &&
         veq(a.edge_vertex_sign, b.edge_vertex_sign) && veq(a.edge_weight, b.edge_weight);
}

}  // namespace

TEST_CASE("icosahedron subdivision counts") {
  Triangulation t0 = subdivide_icosahedron(0);
  CHECK(t0.points.size() == 12);
  CHECK(t0.tris.size() == 20);
  Triangulation t2 = subdivide_icosahedron(2);
  CHECK(t2.points.size() == 162);
  CHECK(t2.tris.size() == 320);
}

TEST_CASE("dodecahedral mesh: counts and closed-form areas") {
  const double R = 2.5;
  VoronoiMesh m = generate_icosphere_mesh(0, 0, R);
  REQUIRE(m.n_cells == 12);
  REQUIRE(m.n_edges == 30);
  REQUIRE(m.n_vertices == 20);

  // All twelve pentagon cells are congruent: each covers 1/12 of the sphere.
  const double cell_exact = 4.0 * M_PI * R * R / 12.0;
  const double vert_exact = 4.0 * M_PI * R * R / 20.0;
  for (int i = 0; i < m.n_cells; ++i)
    CHECK(oracles::rel_diff(m.cell_area[i], cell_exact) < 1e-12);
  for (int v = 0; v < m.n_vertices; ++v)
    CHECK(oracles::rel_diff(m.vertex_area[v], vert_exact) < 1e-12);
}

TEST_CASE("dodecahedral mesh: edge lengths from a hand-built icosahedron") {
  const double R = 1.0;
  VoronoiMesh m = generate_icosphere_mesh(0, 0, R);
  std::vector<Vec3> ico = icosahedron_points();

  // Every Delaunay edge connects two nearest icosahedron vertices, so every
  // d_e equals the icosahedral edge arc; every Voronoi edge connects the
  // circumcenters of two face triangles sharing an edge.
  double d_exact = 1e9;
  for (size_t a = 1; a < ico.size(); ++a)
    d_exact = std::min(d_exact, arc_angle(ico[0], ico[a]));
  // Faces are equilateral, so each circumcenter is the normalized centroid.
  // The two faces sharing the edge (0,1,phi)-(0,-1,phi) have third vertices
  // (+-phi,0,1); their circumcenter separation is the common Voronoi edge
  // length by symmetry.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  Vec3 va = normalized({0.0, 1.0, phi});
  Vec3 vb = normalized({0.0, -1.0, phi});
  Vec3 c1 = normalized(va + vb + normalized({phi, 0.0, 1.0}));
  Vec3 c2 = normalized(va + vb + normalized({-phi, 0.0, 1.0}));
  double l_exact = arc_angle(c1, c2);

  for (int e = 0; e < m.n_edges; ++e) {
    CHECK(oracles::rel_diff(m.edge_dual_len[e], d_exact) < 1e-12);
    CHECK(oracles::rel_diff(m.edge_len[e], l_exact) < 1e-12);
  }
}

TEST_CASE("pentagon perpendicular weights take the two closed-form magnitudes") {
  VoronoiMesh m = generate_icosphere_mesh(0, 0, 1.0);
  for (double w : m.edge_weight) {
    double aw = std::abs(w);
    bool ok = oracles::rel_diff(aw, 0.1) < 1e-12 || oracles::rel_diff(aw, 0.3) < 1e-12;
    CHECK(ok);
  }
}

TEST_CASE("orientation signs match the geometric rule on quasi-uniform meshes") {
  CHECK(oracles::geometric_signs_agree(generate_icosphere_mesh(0, 0, 1.0)));
  CHECK(oracles::geometric_signs_agree(generate_icosphere_mesh(2, 5, 1.0)));
}

TEST_CASE("kite areas partition both cell and vertex areas") {
  for (int level : {0, 2}) {
    VoronoiMesh m = generate_icosphere_mesh(level, 4, 6371.0);
    for (int i = 0; i < m.n_cells; ++i) {
      double s = 0.0;
      int off = m.cell_offset[i];
      for (int j = 0; j < m.ring_size(i); ++j) s += m.kite_area[off + j];
      CHECK(oracles::rel_diff(s, m.cell_area[i]) < 1e-12);
    }
    for (int v = 0; v < m.n_vertices; ++v) {
      double s = m.vertex_kite[v][0] + m.vertex_kite[v][1] + m.vertex_kite[v][2];
      CHECK(oracles::rel_diff(s, m.vertex_area[v]) < 1e-12);
    }
  }
}

TEST_CASE("level-2 mesh: counts, area closure, sign product invariant") {
  const double R = 6371220.0;
  VoronoiMesh m = generate_icosphere_mesh(2, 10, R);
  CHECK(m.n_cells == 162);
  CHECK(m.n_edges == 480);
  CHECK(m.n_vertices == 320);

  double cell_sum = 0.0, vert_sum = 0.0;
  for (double a : m.cell_area) cell_sum += a;
  for (double a : m.vertex_area) vert_sum += a;
  const double sphere = 4.0 * M_PI * R * R;
  CHECK(oracles::rel_diff(cell_sum, sphere) < 1e-11);
  CHECK(oracles::rel_diff(vert_sum, sphere) < 1e-11);

  for (int e = 0; e < m.n_edges; ++e) {
    CHECK(int(m.edge_cell_sign[e][0]) * int(m.edge_cell_sign[e][1]) == -1);
    CHECK(int(m.edge_vertex_sign[e][0]) * int(m.edge_vertex_sign[e][1]) == -1);
  }
}

TEST_CASE("mesh generation is deterministic") {
  VoronoiMesh a = generate_icosphere_mesh(2, 8, 1.0);
  VoronoiMesh b = generate_icosphere_mesh(2, 8, 1.0);
  CHECK(same_mesh_bits(a, b));
}

TEST_CASE("refined mesh: grading, determinism, reduction to uniform") {
  Vec3 center = from_lonlat(3.0 * M_PI / 2.0, M_PI / 6.0);

  VoronoiMesh r1 = generate_refined_mesh(2, center, 0.6, 2, 4, 1.0);
  VoronoiMesh r2 = generate_refined_mesh(2, center, 0.6, 2, 4, 1.0);
  CHECK(same_mesh_bits(r1, r2));
  CHECK(r1.n_cells > 162);  // refinement adds generators

  double amin = 1e300, amax = 0.0;
  for (double a : r1.cell_area) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  // Factor-2 diameter refinement should push the area ratio well past 2.
  CHECK(amax / amin > 2.0);

  // The smallest cells should sit inside the refinement cap.
  int argmin = 0;
  for (int i = 0; i < r1.n_cells; ++i)
    if (r1.cell_area[i] < r1.cell_area[argmin]) argmin = i;
  CHECK(arc_angle(r1.cell_xyz[argmin], center) < 0.6);

  // factor 1 falls back to the uniform generator exactly.
  VoronoiMesh u = generate_refined_mesh(2, center, 0.6, 1, 4, 1.0);
  CHECK(same_mesh_bits(u, generate_icosphere_mesh(2, 4, 1.0)));

  CHECK_THROWS_AS(generate_refined_mesh(2, center, -0.1, 2, 0, 1.0), ConfigError);
}

TEST_CASE("mesh file round trip is bitwise and rewrites are byte-identical") {
  VoronoiMesh m = generate_icosphere_mesh(2, 6, 6371220.0);
  const std::string p1 = "test_mesh_rt1.mswm";
  const std::string p2 = "test_mesh_rt2.mswm";
  write_mesh(m, p1);
  VoronoiMesh back = read_mesh(p1);
  CHECK(same_mesh_bits(m, back));
  write_mesh(back, p2);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("mesh reader skips comment lines") {
  VoronoiMesh m = generate_icosphere_mesh(0, 0, 1.0);
  const std::string p = "test_mesh_comments.mswm";
  write_mesh(m, p);
  spit(p, "# a leading comment\n" + slurp(p));
  VoronoiMesh back = read_mesh(p);
  CHECK(same_mesh_bits(m, back));
  std::remove(p.c_str());
}

TEST_CASE("mesh reader rejects damaged files with located errors") {
  const std::string p = "test_mesh_bad.mswm";

  spit(p, "not a mesh at all\n");
  CHECK_THROWS_AS(read_mesh(p), ParseError);

  spit(p, "MSWM9 12 30 20 1.0\n");
  CHECK_THROWS_AS(read_mesh(p), VersionError);

  VoronoiMesh m = generate_icosphere_mesh(0, 0, 1.0);
  write_mesh(m, p);
  std::string text = slurp(p);
  spit(p, text.substr(0, text.size() / 2));  // truncate mid-file
  bool threw = false;
  try {
    read_mesh(p);
  } catch (const ParseError& err) {
    threw = true;
    CHECK(err.line > 1);
  }
  CHECK(threw);
  std::remove(p.c_str());
}

TEST_CASE("validate_mesh flags broken connectivity") {
  VoronoiMesh m = generate_icosphere_mesh(0, 0, 1.0);
  validate_mesh(m);  // sane mesh passes
  VoronoiMesh bad = m;
  std::swap(bad.edge_cells[3][0], bad.edge_cells[3][1]);  // breaks ascending order
  CHECK_THROWS(validate_mesh(bad));
}

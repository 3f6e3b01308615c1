#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mswm/geometry.hpp"

namespace mswm {

// Spherical triangulation of generator points: the Delaunay mesh whose dual
// is the Voronoi mesh the model runs on. Triangles wind counterclockwise
// seen from outside the sphere.
struct Triangulation {
  std::vector<Vec3> points;
  std::vector<std::array<int, 3>> tris;
};

// C-grid spherical Voronoi mesh. Cells are Voronoi polygons around the
// generators, vertices are Delaunay triangle circumcenters, edges are the
// shared sides. Positions are unit vectors; lengths and areas are physical
// (scaled by sphere_radius).
//
// Ring convention: cell_vertices[i][j] sits between cell_edges[i][j] and
// cell_edges[i][j+1] walking counterclockwise. kite_area uses the same slot
// layout as cell_vertices. edge_cells and edge_vertices are sorted ascending;
// the unit normal of an edge points from the higher-id cell toward the
// lower-id cell, and the tangent is position x normal.
struct VoronoiMesh {
  int n_cells = 0;
  int n_edges = 0;
  int n_vertices = 0;
  double sphere_radius = 1.0;

  std::vector<Vec3> cell_xyz;
  std::vector<Vec3> vertex_xyz;
  std::vector<Vec3> edge_xyz;

  // Cell rings (CSR, counterclockwise).
  std::vector<int> cell_offset;           // n_cells + 1
  std::vector<int> cell_edges;            // ring edges
  std::vector<int> cell_vertices;         // ring vertices, slot j between edges j, j+1
  std::vector<int> cell_cells;            // neighbor across cell_edges[j]

  std::vector<std::array<int, 2>> edge_cells;     // ascending
  std::vector<std::array<int, 2>> edge_vertices;  // ascending
  std::vector<std::array<int, 3>> vertex_cells;
  std::vector<std::array<int, 3>> vertex_edges;

  // Edges sharing a cell with e, lower cell's ring first, each walked
  // counterclockwise starting just after e.
  std::vector<int> edge_edge_offset;      // n_edges + 1
  std::vector<int> edge_edges;

  // Geometry.
  std::vector<double> edge_len;           // Voronoi edge arc length l_e
  std::vector<double> edge_dual_len;      // Delaunay edge arc length d_e
  std::vector<double> cell_area;          // A_i
  std::vector<double> vertex_area;        // A_v
  std::vector<double> kite_area;          // per (cell, ring slot), same CSR as cell_vertices
  std::vector<std::array<double, 3>> vertex_kite;  // kite of vertex_cells[v][k] at v

  // Signs and perpendicular-flux weights.
  std::vector<std::array<int8_t, 2>> edge_cell_sign;    // aligned with edge_cells
  std::vector<std::array<int8_t, 2>> edge_vertex_sign;  // aligned with edge_vertices
  std::vector<double> edge_weight;        // aligned with edge_edges

  int ring_size(int cell) const { return cell_offset[cell + 1] - cell_offset[cell]; }
  std::span<const int> ring_edges(int cell) const {
    return {cell_edges.data() + cell_offset[cell], size_t(ring_size(cell))};
  }
  std::span<const int> ring_vertices(int cell) const {
    return {cell_vertices.data() + cell_offset[cell], size_t(ring_size(cell))};
  }
  std::span<const int> ring_cells(int cell) const {
    return {cell_cells.data() + cell_offset[cell], size_t(ring_size(cell))};
  }
  std::span<const int> perp_edges(int edge) const {
    return {edge_edges.data() + edge_edge_offset[edge],
            size_t(edge_edge_offset[edge + 1] - edge_edge_offset[edge])};
  }
  std::span<const double> perp_weights(int edge) const {
    return {edge_weight.data() + edge_edge_offset[edge],
            size_t(edge_edge_offset[edge + 1] - edge_edge_offset[edge])};
  }

  double cell_sign(int edge, int cell) const {
    return edge_cells[edge][0] == cell ? double(edge_cell_sign[edge][0])
                                       : double(edge_cell_sign[edge][1]);
  }
  double vertex_sign(int edge, int vertex) const {
    return edge_vertices[edge][0] == vertex ? double(edge_vertex_sign[edge][0])
                                            : double(edge_vertex_sign[edge][1]);
  }

  // Unit normal at edge_xyz[e]: from the higher-id cell toward the lower.
  Vec3 edge_normal(int e) const {
    return tangent_toward(edge_xyz[e], cell_xyz[edge_cells[e][0]]);
  }
  Vec3 edge_tangent(int e) const { return cross(edge_xyz[e], edge_normal(e)); }
};

// Icosahedral triangulations. subdivide_icosahedron(0) is the icosahedron
// itself (12 points); each level quadruples the triangle count.
Triangulation subdivide_icosahedron(int level);

// Delaunay triangulation of arbitrary unit points via the convex hull
// (valid because all points lie on the sphere). Throws TopologyError if a
// point ends up unused (degenerate input).
Triangulation triangulate_sphere_points(std::vector<Vec3> points);

// Dualize a triangulation into the full Voronoi mesh: connectivity,
// geometry, signs and perpendicular-flux weights.
VoronoiMesh build_voronoi_mesh(const Triangulation& tri, double radius);

// Quasi-uniform mesh: icosahedron subdivided `level` times, optionally
// relaxed by Lloyd iterations (generators move to cell centroids, fixed
// topology). level is clamped to [0, 7], lloyd_iterations to [0, 200].
VoronoiMesh generate_icosphere_mesh(int level, int lloyd_iterations, double radius);

// Variable-resolution mesh: cells near `center` are finer by roughly
// `refine_factor` in diameter inside angular radius `refine_radius`, with a
// smooth grading band outside it. refine_factor 1 reproduces
// generate_icosphere_mesh(level, ...) exactly. Density-weighted Lloyd
// iterations rebuild the triangulation each pass. refine_factor is clamped
// to [1, 8].
VoronoiMesh generate_refined_mesh(int level, const Vec3& center, double refine_radius,
                                  int refine_factor, int lloyd_iterations, double radius);

// Structural and metric checks; throws TopologyError / GeometryError with
// the offending element id. Called by the builders, available for loaded
// meshes too.
void validate_mesh(const VoronoiMesh& mesh);

// Rebuilds edge_edge_offset/edge_edges from the cell rings (deterministic;
// the weight table is aligned with this walk order). Used by the builder
// and the mesh loader.
void rebuild_edge_stencil(VoronoiMesh& mesh);

// Fills edge_cell_sign/edge_vertex_sign from the ring winding: the normal
// points from the higher-id cell to the lower, and the ring vertex just
// after an edge in the lower cell's counterclockwise walk is the edge's
// -tangent end. Used by the builder and the mesh loader.
void assign_orientation_signs(VoronoiMesh& mesh);

// MSWM1 container format (text). Round-trips bit exactly: floats are
// written with 17 significant digits, derived tables are rebuilt
// deterministically from the stored ones.
void write_mesh(const VoronoiMesh& mesh, const std::string& path);
VoronoiMesh read_mesh(const std::string& path);

}  // namespace mswm

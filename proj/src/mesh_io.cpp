#include <array>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mswm/errors.hpp"
#include "mswm/mesh.hpp"

// MSWM1 mesh container: plain text, one record per line.
//
//   MSWM1 <n_cells> <n_edges> <n_vertices> <radius>
//   @cells         x y z area                          (n_cells lines)
//   @vertices      x y z area                          (n_vertices lines)
//   @edges         c0 c1 v0 v1 x y z len dual_len      (n_edges lines)
//   @connectivity  m e0..e_{m-1} v0..v_{m-1}           (n_cells lines)
//   @geometry      kite_0 .. kite_{m-1}                (n_cells lines)
//   @weights       w_0 .. w_{s-1}                      (n_edges lines)
//
// Ids are 0-based. Floats carry 17 significant digits so a round trip is
// bit exact. Derived tables (neighbor rings, vertex fans, perpendicular
// stencils, orientation signs) are rebuilt deterministically on load.

namespace mswm {

namespace {

void put(std::string& out, double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void put(std::string& out, int v) {
  char buf[16];
  snprintf(buf, sizeof buf, "%d", v);
  out += buf;
}

struct LineReader {
  std::ifstream in;
  std::string buf;
  int line_no = 0;

  explicit LineReader(const std::string& path) : in(path) {}

  const std::string& next(const char* what) {
    for (;;) {
      ++line_no;
      if (!std::getline(in, buf))
        throw ParseError(std::string("unexpected end of file, expected ") + what, line_no);
      if (!buf.empty() && buf[0] == '#') continue;  // comment/header lines
      return buf;
    }
  }
};

struct Tokens {
  const char* p;
  int line;

  double num(const char* what) {
    char* end = nullptr;
    double v = std::strtod(p, &end);
    if (end == p)
      throw ParseError(std::string("expected ") + what, line);
    p = end;
    return v;
  }
  int id(const char* what) {
    char* end = nullptr;
    long v = std::strtol(p, &end, 10);
    if (end == p)
      throw ParseError(std::string("expected ") + what, line);
    p = end;
    return int(v);
  }
};

}  // namespace

void write_mesh(const VoronoiMesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  std::string s;
  s.reserve(1 << 20);

  s += "MSWM1 ";
  put(s, m.n_cells); s += ' ';
  put(s, m.n_edges); s += ' ';
  put(s, m.n_vertices); s += ' ';
  put(s, m.sphere_radius); s += '\n';

  s += "@cells\n";
  for (int i = 0; i < m.n_cells; ++i) {
    put(s, m.cell_xyz[i].x); s += ' ';
    put(s, m.cell_xyz[i].y); s += ' ';
    put(s, m.cell_xyz[i].z); s += ' ';
    put(s, m.cell_area[i]); s += '\n';
  }
  s += "@vertices\n";
  for (int v = 0; v < m.n_vertices; ++v) {
    put(s, m.vertex_xyz[v].x); s += ' ';
    put(s, m.vertex_xyz[v].y); s += ' ';
    put(s, m.vertex_xyz[v].z); s += ' ';
    put(s, m.vertex_area[v]); s += '\n';
  }
  s += "@edges\n";
  for (int e = 0; e < m.n_edges; ++e) {
    put(s, m.edge_cells[e][0]); s += ' ';
    put(s, m.edge_cells[e][1]); s += ' ';
    put(s, m.edge_vertices[e][0]); s += ' ';
    put(s, m.edge_vertices[e][1]); s += ' ';
    put(s, m.edge_xyz[e].x); s += ' ';
    put(s, m.edge_xyz[e].y); s += ' ';
    put(s, m.edge_xyz[e].z); s += ' ';
    put(s, m.edge_len[e]); s += ' ';
    put(s, m.edge_dual_len[e]); s += '\n';
  }
  s += "@connectivity\n";
  for (int i = 0; i < m.n_cells; ++i) {
    put(s, m.ring_size(i));
    for (int e : m.ring_edges(i)) { s += ' '; put(s, e); }
    for (int v : m.ring_vertices(i)) { s += ' '; put(s, v); }
    s += '\n';
  }
  s += "@geometry\n";
  for (int i = 0; i < m.n_cells; ++i) {
    for (int j = m.cell_offset[i]; j < m.cell_offset[i + 1]; ++j) {
      if (j > m.cell_offset[i]) s += ' ';
      put(s, m.kite_area[j]);
    }
    s += '\n';
  }
  s += "@weights\n";
  for (int e = 0; e < m.n_edges; ++e) {
    for (int j = m.edge_edge_offset[e]; j < m.edge_edge_offset[e + 1]; ++j) {
      if (j > m.edge_edge_offset[e]) s += ' ';
      put(s, m.edge_weight[j]);
    }
    s += '\n';
  }
  out << s;
  if (!out) throw Error("failed writing " + path);
}

VoronoiMesh read_mesh(const std::string& path) {
  LineReader r(path);
  if (!r.in) throw Error("cannot open " + path);

  const std::string& header = r.next("header");
  if (header.rfind("MSWM", 0) != 0)
    throw ParseError("not a mesh file (missing MSWM magic)", r.line_no);
  if (header.rfind("MSWM1 ", 0) != 0)
    throw VersionError("unsupported mesh format version in '" + header.substr(0, 8) + "'");
  Tokens t{header.c_str() + 5, r.line_no};
  VoronoiMesh m;
  m.n_cells = t.id("cell count");
  m.n_edges = t.id("edge count");
  m.n_vertices = t.id("vertex count");
  m.sphere_radius = t.num("radius");
  if (m.n_cells < 4 || m.n_edges < 6 || m.n_vertices < 4 || !(m.sphere_radius > 0.0))
    throw ParseError("implausible mesh header", r.line_no);

  auto expect_section = [&](const char* name) {
    if (r.next(name) != name)
      throw ParseError(std::string("expected section ") + name, r.line_no);
  };

  expect_section("@cells");
  m.cell_xyz.resize(m.n_cells);
  m.cell_area.resize(m.n_cells);
  for (int i = 0; i < m.n_cells; ++i) {
    Tokens tt{r.next("cell record").c_str(), r.line_no};
    m.cell_xyz[i] = {tt.num("x"), tt.num("y"), tt.num("z")};
    m.cell_area[i] = tt.num("area");
  }
  expect_section("@vertices");
  m.vertex_xyz.resize(m.n_vertices);
  m.vertex_area.resize(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v) {
    Tokens tt{r.next("vertex record").c_str(), r.line_no};
    m.vertex_xyz[v] = {tt.num("x"), tt.num("y"), tt.num("z")};
    m.vertex_area[v] = tt.num("area");
  }
  expect_section("@edges");
  m.edge_cells.resize(m.n_edges);
  m.edge_vertices.resize(m.n_edges);
  m.edge_xyz.resize(m.n_edges);
  m.edge_len.resize(m.n_edges);
  m.edge_dual_len.resize(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e) {
    Tokens tt{r.next("edge record").c_str(), r.line_no};
    m.edge_cells[e] = {tt.id("cell id"), tt.id("cell id")};
    m.edge_vertices[e] = {tt.id("vertex id"), tt.id("vertex id")};
    m.edge_xyz[e] = {tt.num("x"), tt.num("y"), tt.num("z")};
    m.edge_len[e] = tt.num("length");
    m.edge_dual_len[e] = tt.num("dual length");
    auto [c0, c1] = m.edge_cells[e];
    auto [v0, v1] = m.edge_vertices[e];
    if (c0 < 0 || c1 >= m.n_cells || c0 >= c1)
      throw TopologyError("edge " + std::to_string(e) +
                          " must border two distinct ascending cells (line " +
                          std::to_string(r.line_no) + ")");
    if (v0 < 0 || v1 >= m.n_vertices || v0 >= v1)
      throw TopologyError("edge " + std::to_string(e) +
                          " must join two distinct ascending vertices (line " +
                          std::to_string(r.line_no) + ")");
  }

  expect_section("@connectivity");
  m.cell_offset.assign(m.n_cells + 1, 0);
  std::vector<std::vector<int>> ring_e(m.n_cells), ring_v(m.n_cells);
  for (int i = 0; i < m.n_cells; ++i) {
    Tokens tt{r.next("connectivity record").c_str(), r.line_no};
    int mm = tt.id("ring size");
    if (mm < 3 || mm > 64)
      throw TopologyError("cell " + std::to_string(i) + " has implausible ring size " +
                          std::to_string(mm));
    ring_e[i].resize(mm);
    ring_v[i].resize(mm);
    for (int j = 0; j < mm; ++j) ring_e[i][j] = tt.id("edge id");
    for (int j = 0; j < mm; ++j) ring_v[i][j] = tt.id("vertex id");
    m.cell_offset[i + 1] = m.cell_offset[i] + mm;
  }
  int total = m.cell_offset[m.n_cells];
  m.cell_edges.resize(total);
  m.cell_vertices.resize(total);
  for (int i = 0; i < m.n_cells; ++i) {
    std::copy(ring_e[i].begin(), ring_e[i].end(), m.cell_edges.begin() + m.cell_offset[i]);
    std::copy(ring_v[i].begin(), ring_v[i].end(), m.cell_vertices.begin() + m.cell_offset[i]);
  }

  expect_section("@geometry");
  m.kite_area.resize(total);
  for (int i = 0; i < m.n_cells; ++i) {
    Tokens tt{r.next("kite record").c_str(), r.line_no};
    for (int j = m.cell_offset[i]; j < m.cell_offset[i + 1]; ++j)
      m.kite_area[j] = tt.num("kite area");
  }

  // Neighbor ring across each edge.
  m.cell_cells.resize(total);
  for (int i = 0; i < m.n_cells; ++i)
    for (int j = m.cell_offset[i]; j < m.cell_offset[i + 1]; ++j) {
      int e = m.cell_edges[j];
      if (e < 0 || e >= m.n_edges)
        throw TopologyError("cell " + std::to_string(i) + " lists unknown edge " +
                            std::to_string(e));
      if (m.edge_cells[e][0] == i) m.cell_cells[j] = m.edge_cells[e][1];
      else if (m.edge_cells[e][1] == i) m.cell_cells[j] = m.edge_cells[e][0];
      else
        throw TopologyError("cell " + std::to_string(i) + " lists edge " +
                            std::to_string(e) + " it does not border");
    }

  // Canonical vertex fans: the three incident cells, smallest id first,
  // wound counterclockwise; edges join consecutive fan cells.
  std::vector<std::array<int, 3>> vc(m.n_vertices, {-1, -1, -1});
  for (int i = 0; i < m.n_cells; ++i)
    for (int j = m.cell_offset[i]; j < m.cell_offset[i + 1]; ++j) {
      int v = m.cell_vertices[j];
      if (v < 0 || v >= m.n_vertices)
        throw TopologyError("cell " + std::to_string(i) + " lists unknown vertex " +
                            std::to_string(v));
      auto& slots = vc[v];
      if (slots[0] == -1) slots[0] = i;
      else if (slots[1] == -1) slots[1] = i;
      else if (slots[2] == -1) slots[2] = i;
      else
        throw TopologyError("vertex " + std::to_string(v) + " touches more than 3 cells");
    }
  std::unordered_map<uint64_t, int> edge_of;
  edge_of.reserve(m.n_edges * 2);
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (uint64_t(a) << 32) | uint64_t(b);
  };
  for (int e = 0; e < m.n_edges; ++e)
    if (!edge_of.emplace(key(m.edge_cells[e][0], m.edge_cells[e][1]), e).second)
      throw TopologyError("duplicate edge between cells " +
                          std::to_string(m.edge_cells[e][0]) + " and " +
                          std::to_string(m.edge_cells[e][1]));
  m.vertex_cells.resize(m.n_vertices);
  m.vertex_edges.resize(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v) {
    auto [a, b, c] = vc[v];
    if (c == -1)
      throw TopologyError("vertex " + std::to_string(v) + " touches fewer than 3 cells");
    if (b < a) std::swap(a, b);
    if (c < a) std::swap(a, c);
    double det = dot(m.cell_xyz[a], cross(m.cell_xyz[b], m.cell_xyz[c]));
    if (det < 0.0) std::swap(b, c);
    m.vertex_cells[v] = {a, b, c};
    for (int k = 0; k < 3; ++k) {
      auto it = edge_of.find(key(m.vertex_cells[v][k], m.vertex_cells[v][(k + 1) % 3]));
      if (it == edge_of.end())
        throw TopologyError("vertex " + std::to_string(v) + " fan is not closed by edges");
      m.vertex_edges[v][k] = it->second;
    }
  }

  m.vertex_kite.resize(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v)
    for (int k = 0; k < 3; ++k) {
      int i = m.vertex_cells[v][k];
      auto ring = m.ring_vertices(i);
      int slot = 0;
      while (slot < int(ring.size()) && ring[slot] != v) ++slot;
      if (slot == int(ring.size()))
        throw TopologyError("vertex " + std::to_string(v) + " missing from ring of cell " +
                            std::to_string(i));
      m.vertex_kite[v][k] = m.kite_area[m.cell_offset[i] + slot];
    }

  rebuild_edge_stencil(m);

  expect_section("@weights");
  m.edge_weight.assign(m.edge_edges.size(), 0.0);
  for (int e = 0; e < m.n_edges; ++e) {
    Tokens tt{r.next("weight record").c_str(), r.line_no};
    for (int j = m.edge_edge_offset[e]; j < m.edge_edge_offset[e + 1]; ++j)
      m.edge_weight[j] = tt.num("weight");
  }

  // Orientation signs follow from the stored ring winding; identical
  // inputs give identical signs.
  assign_orientation_signs(m);

  validate_mesh(m);
  return m;
}

}  // namespace mswm

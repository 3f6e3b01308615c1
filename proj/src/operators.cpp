#include <cmath>
#include <limits>
#include <string>

#include "mswm/errors.hpp"
#include "mswm/operators.hpp"

namespace mswm {

void TendencyScratch::bind(const VoronoiMesh& mesh) {
  flux.assign(mesh.n_edges, 0.0);
  qtilde.assign(mesh.n_edges, 0.0);
  kinetic.assign(mesh.n_cells, 0.0);
  pv.assign(mesh.n_vertices, 0.0);
  flux_mark.assign(mesh.n_edges, 0);
  qt_mark.assign(mesh.n_edges, 0);
  cell_mark.assign(mesh.n_cells, 0);
  vertex_mark.assign(mesh.n_vertices, 0);
  epoch = 0;
}

void shallow_water_tendencies(const VoronoiMesh& m, const double* h, const double* u,
                              const double* b, const double* f_vertex, double gravity,
                              ElementSets sets, double* dh, double* du,
                              TendencyScratch& s, int replication) {
  if (s.flux_mark.size() != size_t(m.n_edges) || s.cell_mark.size() != size_t(m.n_cells))
    s.bind(m);
  ++s.epoch;
  const int ep = s.epoch;
  s.flux_ids.clear();
  s.qt_ids.clear();
  s.cell_ids.clear();
  s.vertex_ids.clear();

  auto need_flux = [&](int e) {
    if (s.flux_mark[e] != ep) { s.flux_mark[e] = ep; s.flux_ids.push_back(e); }
  };
  auto need_qt = [&](int e) {
    if (s.qt_mark[e] != ep) { s.qt_mark[e] = ep; s.qt_ids.push_back(e); }
  };
  auto need_k = [&](int i) {
    if (s.cell_mark[i] != ep) { s.cell_mark[i] = ep; s.cell_ids.push_back(i); }
  };
  auto need_q = [&](int v) {
    if (s.vertex_mark[v] != ep) { s.vertex_mark[v] = ep; s.vertex_ids.push_back(v); }
  };

  for (int i : sets.cells)
    for (int e : m.ring_edges(i)) need_flux(e);
  for (int e : sets.edges) {
    need_qt(e);
    for (int side = 0; side < 2; ++side) {
      int i = m.edge_cells[e][side];
      need_k(i);
      for (int e2 : m.ring_edges(i)) { need_flux(e2); need_qt(e2); }
      for (int v : m.ring_vertices(i)) need_q(v);
    }
  }

  for (int rep = 0; rep < replication; ++rep) {
    for (int e : s.flux_ids)
      s.flux[e] = 0.5 * (h[m.edge_cells[e][0]] + h[m.edge_cells[e][1]]) * u[e];

    for (int i : s.cell_ids) {
      int off = m.cell_offset[i], mm = m.ring_size(i);
      double acc = 0.0;
      for (int j = 0; j < mm; ++j) {
        int e = m.cell_edges[off + j];
        acc += m.edge_len[e] * m.edge_dual_len[e] * u[e] * u[e];
      }
      s.kinetic[i] = acc / (4.0 * m.cell_area[i]);
    }

    for (int v : s.vertex_ids) {
      double hv = 0.0, circ = 0.0;
      for (int k = 0; k < 3; ++k) {
        hv += m.vertex_kite[v][k] * h[m.vertex_cells[v][k]];
        int e = m.vertex_edges[v][k];
        circ += m.vertex_sign(e, v) * m.edge_dual_len[e] * u[e];
      }
      hv /= m.vertex_area[v];
      if (!(hv > 0.0))
        throw DryVertexError("vertex " + std::to_string(v) +
                             " has non-positive thickness " + std::to_string(hv), v);
      s.pv[v] = (f_vertex[v] + circ / m.vertex_area[v]) / hv;
    }

    for (int e : s.qt_ids)
      s.qtilde[e] = 0.5 * (s.pv[m.edge_vertices[e][0]] + s.pv[m.edge_vertices[e][1]]);

    for (int i : sets.cells) {
      int off = m.cell_offset[i], mm = m.ring_size(i);
      double acc = 0.0;
      for (int j = 0; j < mm; ++j) {
        int e = m.cell_edges[off + j];
        acc += m.cell_sign(e, i) * m.edge_len[e] * s.flux[e];
      }
      dh[i] = -acc / m.cell_area[i];
    }

    for (int e : sets.edges) {
      const double qt_e = s.qtilde[e];
      const double inv_d = 1.0 / m.edge_dual_len[e];
      double pvflux = 0.0;
      auto stencil = m.perp_edges(e);
      auto weights = m.perp_weights(e);
      for (size_t j = 0; j < stencil.size(); ++j) {
        int e2 = stencil[j];
        pvflux += weights[j] * (m.edge_len[e2] * inv_d) * s.flux[e2] *
                  (0.5 * (qt_e + s.qtilde[e2]));
      }
      int lo = m.edge_cells[e][0], hi = m.edge_cells[e][1];
      double psi_lo = gravity * (h[lo] + b[lo]) + s.kinetic[lo];
      double psi_hi = gravity * (h[hi] + b[hi]) + s.kinetic[hi];
      du[e] = -pvflux - (psi_lo - psi_hi) * inv_d;
    }
  }
}

EdgeField thickness_to_edge(const VoronoiMesh& m, const CellField& h) {
  EdgeField out(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e)
    out[e] = 0.5 * (h[m.edge_cells[e][0]] + h[m.edge_cells[e][1]]);
  return out;
}

CellField divergence(const VoronoiMesh& m, const EdgeField& F) {
  CellField out(m.n_cells);
  for (int i = 0; i < m.n_cells; ++i) {
    double acc = 0.0;
    for (int e : m.ring_edges(i)) acc += m.cell_sign(e, i) * m.edge_len[e] * F[e];
    out[i] = acc / m.cell_area[i];
  }
  return out;
}

EdgeField gradient(const VoronoiMesh& m, const CellField& phi) {
  EdgeField out(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e) {
    double acc = 0.0;
    for (int side = 0; side < 2; ++side) {
      int i = m.edge_cells[e][side];
      acc -= m.cell_sign(e, i) * phi[i];
    }
    out[e] = acc / m.edge_dual_len[e];
  }
  return out;
}

CellField kinetic_energy(const VoronoiMesh& m, const EdgeField& u) {
  CellField out(m.n_cells);
  for (int i = 0; i < m.n_cells; ++i) {
    double acc = 0.0;
    for (int e : m.ring_edges(i))
      acc += m.edge_len[e] * m.edge_dual_len[e] * u[e] * u[e];
    out[i] = acc / (4.0 * m.cell_area[i]);
  }
  return out;
}

VertexField vorticity_and_pv(const VoronoiMesh& m, const CellField& h, const EdgeField& u,
                             const VertexField& f) {
  VertexField out(m.n_vertices);
  for (int v = 0; v < m.n_vertices; ++v) {
    double hv = 0.0, circ = 0.0;
    for (int k = 0; k < 3; ++k) {
      hv += m.vertex_kite[v][k] * h[m.vertex_cells[v][k]];
      int e = m.vertex_edges[v][k];
      circ += m.vertex_sign(e, v) * m.edge_dual_len[e] * u[e];
    }
    hv /= m.vertex_area[v];
    if (!(hv > 0.0))
      throw DryVertexError("vertex " + std::to_string(v) +
                           " has non-positive thickness " + std::to_string(hv), v);
    out[v] = (f[v] + circ / m.vertex_area[v]) / hv;
  }
  return out;
}

EdgeField perp_flux(const VoronoiMesh& m, const EdgeField& F) {
  EdgeField out(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e) {
    double acc = 0.0;
    auto stencil = m.perp_edges(e);
    auto weights = m.perp_weights(e);
    for (size_t j = 0; j < stencil.size(); ++j)
      acc += weights[j] * (m.edge_len[stencil[j]] / m.edge_dual_len[e]) * F[stencil[j]];
    out[e] = acc;
  }
  return out;
}

EdgeField pv_flux_term(const VoronoiMesh& m, const VertexField& q, const EdgeField& F) {
  std::vector<double> qt(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e)
    qt[e] = 0.5 * (q[m.edge_vertices[e][0]] + q[m.edge_vertices[e][1]]);
  EdgeField out(m.n_edges);
  for (int e = 0; e < m.n_edges; ++e) {
    double acc = 0.0;
    auto stencil = m.perp_edges(e);
    auto weights = m.perp_weights(e);
    for (size_t j = 0; j < stencil.size(); ++j) {
      int e2 = stencil[j];
      acc += weights[j] * (m.edge_len[e2] / m.edge_dual_len[e]) * F[e2] *
             (0.5 * (qt[e] + qt[e2]));
    }
    out[e] = acc;
  }
  return out;
}

Tendencies tendencies(const VoronoiMesh& m, const CellField& h, const EdgeField& u,
                      const CellField& b, const VertexField& f, double gravity,
                      ElementSets sets) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Tendencies out{CellField(m.n_cells, nan), EdgeField(m.n_edges, nan)};
  TendencyScratch scratch;
  scratch.bind(m);
  shallow_water_tendencies(m, h.ptr(), u.ptr(), b.ptr(), f.ptr(), gravity, sets,
                           out.dh.ptr(), out.du.ptr(), scratch);
  return out;
}

}  // namespace mswm

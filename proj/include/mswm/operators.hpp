#pragma once

#include <span>
#include <vector>

#include "mswm/fields.hpp"
#include "mswm/mesh.hpp"

namespace mswm {

struct Tendencies {
  CellField dh;
  EdgeField du;
};

// Element subsets a tendency evaluation covers. Ids ascending, no
// duplicates. Every listed element must have valid state on its full
// two-ring stencil.
struct ElementSets {
  std::span<const int> cells;
  std::span<const int> edges;
};

// Scratch buffers for the fused right-hand-side kernel, reusable across
// calls. Stamped marking keeps restricted evaluations from touching (and
// from accidentally depending on) anything outside the requested stencils.
struct TendencyScratch {
  std::vector<double> flux, qtilde;       // per edge
  std::vector<double> kinetic;            // per cell
  std::vector<double> pv;                 // per vertex
  std::vector<int> flux_mark, qt_mark, cell_mark, vertex_mark;
  std::vector<int> flux_ids, qt_ids, cell_ids, vertex_ids;
  int epoch = 0;

  void bind(const VoronoiMesh& mesh);
};

// Shallow-water right-hand side on the requested sets:
//   dh_i = -div(F)_i,  F_e = mean(h) u_e
//   du_e = -pvflux_e - grad(g (h+b) + K)_e
// Only dh[cells] and du[edges] are written. Per-element arithmetic is a
// fixed-order function of the mesh tables, so any restriction is bitwise
// equal to the full evaluation. `replication` repeats the arithmetic to
// emulate a vertically layered kernel cost; results are unchanged.
// Throws DryVertexError when an interpolated vertex thickness is not
// positive.
void shallow_water_tendencies(const VoronoiMesh& mesh, const double* h, const double* u,
                              const double* b, const double* f_vertex, double gravity,
                              ElementSets sets, double* dh, double* du,
                              TendencyScratch& scratch, int replication = 1);

// Standalone operators (diagnostics and tests; allocate their results).
EdgeField thickness_to_edge(const VoronoiMesh&, const CellField& h);
CellField divergence(const VoronoiMesh&, const EdgeField& F);
EdgeField gradient(const VoronoiMesh&, const CellField& phi);
CellField kinetic_energy(const VoronoiMesh&, const EdgeField& u);
// q_v = (f_v + circulation_v / A_v) / h_v with kite-weighted h_v.
VertexField vorticity_and_pv(const VoronoiMesh&, const CellField& h, const EdgeField& u,
                             const VertexField& f);
EdgeField perp_flux(const VoronoiMesh&, const EdgeField& F);
// Energy-conserving combined product: sum_{e'} w_{e,e'} (l_{e'}/d_e) F_{e'}
// (qt_e + qt_{e'})/2. Never forms 1/perp_flux.
EdgeField pv_flux_term(const VoronoiMesh&, const VertexField& q, const EdgeField& F);

// Convenience wrapper over the fused kernel; entries outside the sets are
// set to NaN.
Tendencies tendencies(const VoronoiMesh&, const CellField& h, const EdgeField& u,
                      const CellField& b, const VertexField& f, double gravity,
                      ElementSets sets);

}  // namespace mswm

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mswm/errors.hpp"
#include "mswm/mesh.hpp"
#include "mswm/operators.hpp"
#include "oracles.hpp"

using namespace mswm;

namespace {

struct Fixture {
  VoronoiMesh mesh;
  CellField h, b;
  EdgeField u;
  VertexField f;

  explicit Fixture(VoronoiMesh m, std::uint64_t seed)
      : mesh(std::move(m)),
        h(oracles::random_cell_field(mesh, seed, 900.0, 1100.0)),
        b(oracles::random_cell_field(mesh, seed + 1, 0.0, 50.0)),
        u(oracles::random_edge_field(mesh, seed + 2, -25.0, 25.0)),
        f(oracles::random_vertex_field(mesh, seed + 3, -1e-4, 1e-4)) {}
};

std::vector<int> all_ids(int n) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

}  // namespace

TEST_CASE("standalone operators agree with brute-force references") {
  for (int level : {0, 2}) {
    Fixture fx(generate_icosphere_mesh(level, 3, 6371220.0), 42 + level);
    const VoronoiMesh& m = fx.mesh;

    EdgeField F = thickness_to_edge(m, fx.h);
    for (int e = 0; e < m.n_edges; ++e)
      CHECK(F[e] == 0.5 * (fx.h[m.edge_cells[e][0]] + fx.h[m.edge_cells[e][1]]));
    for (int e = 0; e < m.n_edges; ++e) F[e] *= fx.u[e];

    CHECK(oracles::max_rel_diff(divergence(m, F), oracles::divergence(m, F)) < 1e-13);
    CHECK(oracles::max_rel_diff(gradient(m, fx.h), oracles::gradient(m, fx.h)) < 1e-13);
    CHECK(oracles::max_rel_diff(kinetic_energy(m, fx.u),
                                oracles::kinetic_energy(m, fx.u)) < 1e-13);

    VertexField q = vorticity_and_pv(m, fx.h, fx.u, fx.f);
    CHECK(oracles::max_rel_diff(q, oracles::potential_vorticity(m, fx.h, fx.u, fx.f)) <
          1e-13);
    // Entries of the rotated flux can cancel to a sliver of the field scale,
    // so these two are judged normwise instead of entrywise.
    CHECK(oracles::max_scaled_diff(perp_flux(m, F), oracles::perp_flux(m, F)) < 1e-13);
    CHECK(oracles::max_scaled_diff(pv_flux_term(m, q, F),
                                   oracles::pv_flux_term(m, q, F)) < 1e-13);
  }
}

TEST_CASE("fused kernel matches the operator composition") {
  for (int level : {0, 2}) {
    Fixture fx(generate_icosphere_mesh(level, 3, 6371220.0), 7 + level);
    const VoronoiMesh& m = fx.mesh;
    const double g = 9.80616;

    auto ids_c = all_ids(m.n_cells);
    auto ids_e = all_ids(m.n_edges);
    Tendencies t = tendencies(m, fx.h, fx.u, fx.b, fx.f, g, {ids_c, ids_e});
    oracles::RhsOracle ref = oracles::shallow_water_rhs(m, fx.h, fx.u, fx.b, fx.f, g);

    CHECK(oracles::max_rel_diff(t.dh, ref.dh, 1e-10) < 1e-13);
    CHECK(oracles::max_scaled_diff(t.du, ref.du) < 1e-13);
  }
}

TEST_CASE("flat state at rest has exactly zero tendencies") {
  VoronoiMesh m = generate_icosphere_mesh(2, 3, 6371220.0);
  CellField h(m.n_cells, 5960.0), b(m.n_cells, 0.0);
  EdgeField u(m.n_edges, 0.0);
  VertexField f = oracles::random_vertex_field(m, 5, -1e-4, 1e-4);

  Tendencies t = tendencies(m, h, u, b, f, 9.80616,
                            {all_ids(m.n_cells), all_ids(m.n_edges)});
  for (int i = 0; i < m.n_cells; ++i) CHECK(t.dh[i] == 0.0);
  for (int e = 0; e < m.n_edges; ++e) CHECK(t.du[e] == 0.0);

  EdgeField gphi = gradient(m, h);  // constant field: exact cancellation
  for (int e = 0; e < m.n_edges; ++e) CHECK(gphi[e] == 0.0);
}

TEST_CASE("discrete divergence conserves area-weighted mass") {
  VoronoiMesh m = generate_icosphere_mesh(2, 3, 1.0);
  EdgeField F = oracles::random_edge_field(m, 11, -1.0, 1.0);
  CellField div = divergence(m, F);
  double sum = 0.0, scale = 0.0;
  for (int i = 0; i < m.n_cells; ++i) {
    sum += m.cell_area[i] * div[i];
    scale += std::abs(m.cell_area[i] * div[i]);
  }
  CHECK(std::abs(sum) < 1e-13 * scale);
}

TEST_CASE("perpendicular weights are antisymmetric and energy neutral") {
  for (int level : {0, 2}) {
    VoronoiMesh m = generate_icosphere_mesh(level, 3, 1.0);

    // w[e][e'] == -w[e'][e], looked up across the two stencils.
    for (int e = 0; e < m.n_edges; ++e) {
      auto st = m.perp_edges(e);
      auto wt = m.perp_weights(e);
      for (size_t j = 0; j < st.size(); ++j) {
        int e2 = st[j];
        auto st2 = m.perp_edges(e2);
        auto wt2 = m.perp_weights(e2);
        double back = std::numeric_limits<double>::quiet_NaN();
        for (size_t k = 0; k < st2.size(); ++k)
          if (st2[k] == e) back = wt2[k];
        REQUIRE(back == back);
        CHECK(std::abs(wt[j] + back) < 1e-12);
      }
    }

    // sum_e l_e d_e F_e perp(F)_e vanishes by that antisymmetry.
    EdgeField F = oracles::random_edge_field(m, 23, -1.0, 1.0);
    EdgeField P = perp_flux(m, F);
    VertexField q = oracles::random_vertex_field(m, 29, 0.5, 1.5);
    EdgeField pvf = pv_flux_term(m, q, F);
    double dotp = 0.0, dots = 0.0, scale = 0.0;
    for (int e = 0; e < m.n_edges; ++e) {
      double w = m.edge_len[e] * m.edge_dual_len[e] * F[e];
      dotp += w * P[e];
      dots += w * pvf[e];
      scale += std::abs(w) * (std::abs(P[e]) + std::abs(pvf[e]) + 1e-30);
    }
    CHECK(std::abs(dotp) < 1e-12 * scale);
    CHECK(std::abs(dots) < 1e-12 * scale);
  }
}

TEST_CASE("reverse ring walk reproduces the stored perpendicular weights") {
  std::vector<VoronoiMesh> meshes;
  meshes.push_back(generate_icosphere_mesh(0, 0, 1.0));
  meshes.push_back(generate_icosphere_mesh(2, 5, 1.0));
  meshes.push_back(generate_refined_mesh(2, from_lonlat(4.71238898038469, 0.5235987755982988),
                                         0.6, 2, 4, 1.0));
  for (const VoronoiMesh& m : meshes) {
    for (int e = 0; e < m.n_edges; ++e) {
      auto st = m.perp_edges(e);
      auto wt = m.perp_weights(e);
      auto rev = oracles::perp_stencil_reverse(m, e);
      REQUIRE(rev.size() == st.size());
      for (size_t j = 0; j < st.size(); ++j) {
        CHECK(rev[j].edge == st[j]);
        CHECK(std::abs(rev[j].weight - wt[j]) < 1e-13);
      }
    }
  }
}

TEST_CASE("restricted evaluations are bitwise equal to the full one") {
  Fixture fx(generate_icosphere_mesh(2, 3, 6371220.0), 99);
  const VoronoiMesh& m = fx.mesh;
  const double g = 9.80616;
  const double sentinel = 123456789.0;

  CellField dh_full(m.n_cells, sentinel);
  EdgeField du_full(m.n_edges, sentinel);
  TendencyScratch scratch;
  scratch.bind(m);
  auto ids_c = all_ids(m.n_cells);
  auto ids_e = all_ids(m.n_edges);
  shallow_water_tendencies(m, fx.h.ptr(), fx.u.ptr(), fx.b.ptr(), fx.f.ptr(), g,
                           {ids_c, ids_e}, dh_full.ptr(), du_full.ptr(), scratch);

  // A few disjoint-ish subsets, including empty edge and cell lists.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> subsets;
  subsets.push_back({{0, 5, 17, 160}, {2, 3, 100, 479}});
  subsets.push_back({{}, {7, 8, 9}});
  subsets.push_back({{1, 2, 3}, {}});
  std::vector<int> odd_c, odd_e;
  for (int i = 1; i < m.n_cells; i += 2) odd_c.push_back(i);
  for (int e = 1; e < m.n_edges; e += 2) odd_e.push_back(e);
  subsets.push_back({odd_c, odd_e});

  for (const auto& [cells, edges] : subsets) {
    CellField dh(m.n_cells, sentinel);
    EdgeField du(m.n_edges, sentinel);
    shallow_water_tendencies(m, fx.h.ptr(), fx.u.ptr(), fx.b.ptr(), fx.f.ptr(), g,
                             {cells, edges}, dh.ptr(), du.ptr(), scratch);
    std::vector<bool> in_c(m.n_cells, false), in_e(m.n_edges, false);
    for (int i : cells) in_c[i] = true;
    for (int e : edges) in_e[e] = true;
    for (int i = 0; i < m.n_cells; ++i)
      CHECK(dh[i] == (in_c[i] ? dh_full[i] : sentinel));
    for (int e = 0; e < m.n_edges; ++e)
      CHECK(du[e] == (in_e[e] ? du_full[e] : sentinel));
  }
}

TEST_CASE("cost replication repeats arithmetic without changing results") {
  Fixture fx(generate_icosphere_mesh(1, 2, 6371220.0), 3);
  const VoronoiMesh& m = fx.mesh;
  auto ids_c = all_ids(m.n_cells);
  auto ids_e = all_ids(m.n_edges);
  TendencyScratch scratch;
  scratch.bind(m);

  CellField dh1(m.n_cells), dh3(m.n_cells);
  EdgeField du1(m.n_edges), du3(m.n_edges);
  shallow_water_tendencies(m, fx.h.ptr(), fx.u.ptr(), fx.b.ptr(), fx.f.ptr(), 9.80616,
                           {ids_c, ids_e}, dh1.ptr(), du1.ptr(), scratch, 1);
  shallow_water_tendencies(m, fx.h.ptr(), fx.u.ptr(), fx.b.ptr(), fx.f.ptr(), 9.80616,
                           {ids_c, ids_e}, dh3.ptr(), du3.ptr(), scratch, 3);
  for (int i = 0; i < m.n_cells; ++i) CHECK(dh1[i] == dh3[i]);
  for (int e = 0; e < m.n_edges; ++e) CHECK(du1[e] == du3[e]);
}

TEST_CASE("drained vertices are reported with their id") {
  VoronoiMesh m = generate_icosphere_mesh(0, 0, 1.0);
  CellField h(m.n_cells, 1.0), b(m.n_cells, 0.0);
  h[4] = -40.0;  // drags its surrounding vertex thicknesses below zero
  EdgeField u(m.n_edges, 0.1);
  VertexField f(m.n_vertices, 0.0);

  CHECK_THROWS_AS(vorticity_and_pv(m, h, u, f), DryVertexError);
  try {
    Tendencies t = tendencies(m, h, u, b, f, 9.80616,
                              {all_ids(m.n_cells), all_ids(m.n_edges)});
    (void)t;
    CHECK(false);
  } catch (const DryVertexError& err) {
    CHECK(err.vertex >= 0);
    CHECK(err.vertex < m.n_vertices);
    bool touches = false;
    for (int k = 0; k < 3; ++k) touches |= m.vertex_cells[err.vertex][k] == 4;
    CHECK(touches);
  }
}

TEST_CASE("tendencies wrapper marks unevaluated entries as NaN") {
  Fixture fx(generate_icosphere_mesh(0, 0, 6371220.0), 77);
  const VoronoiMesh& m = fx.mesh;
  std::vector<int> cells = {0, 1};
  std::vector<int> edges = {10, 11};
  Tendencies t = tendencies(m, fx.h, fx.u, fx.b, fx.f, 9.80616, {cells, edges});
  for (int i = 0; i < m.n_cells; ++i)
    CHECK(std::isnan(t.dh[i]) == (i != 0 && i != 1));
  for (int e = 0; e < m.n_edges; ++e)
    CHECK(std::isnan(t.du[e]) == (e != 10 && e != 11));
}

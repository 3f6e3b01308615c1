// Acceptance gate for the multirate shallow-water core.  Runs eight
// end-to-end checks on a locally refined spherical mesh and prints exactly
// one PASS/FAIL line per criterion with the measured numbers.  Exit code is
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "mswm/errors.hpp"
#include "mswm/harness.hpp"
#include "mswm/integrators.hpp"
#include "mswm/mesh.hpp"
#include "mswm/partition.hpp"
#include "mswm/rank_pool.hpp"
#include "mswm/regions.hpp"
#include "oracles.hpp"

using namespace mswm;

namespace {

// Shared fixture: a mountain-centered refined mesh of a few thousand cells
// with a one-layer-wide interface band around the fine cap.
constexpr int kLevel = 3;
constexpr int kFactor = 4;
constexpr int kLloyd = 10;
constexpr double kGradeRadius = 0.70;  // mesh refinement cap, radians
constexpr double kCapRadius = 0.42;    // fine-region cap, radians
constexpr double kLonC = 4.71238898038468986;
constexpr double kLatC = 0.52359877559829887;
constexpr double kRadius = 6371220.0;

struct Fixture {
  VoronoiMesh mesh;
  RegionMap map;
};

Fixture build_fixture() {
  Fixture fx;
  const Vec3 center = from_lonlat(kLonC, kLatC);
  fx.mesh = generate_refined_mesh(kLevel, center, kGradeRadius, kFactor,
                                  kLloyd, kRadius);
  fx.map = make_regions(
      fx.mesh,
      [&](int i) { return arc_angle(fx.mesh.cell_xyz[i], center) < kCapRadius; },
      1);
  return fx;
}

int g_failures = 0;

void run_criterion(int idx, const char* title,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%s criterion %d: %s [%s; %.1fs]\n", ok ? "PASS" : "FAIL", idx,
              title, detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Largest relative difference over both fields; velocities are measured
// against a 1 m/s floor so near-zero winds do not inflate the ratio.
double state_max_rel(const State& a, const State& b) {
  double rel = 0.0;
  for (std::size_t i = 0; i < a.h.size(); ++i)
    rel = std::max(rel, std::abs(a.h[i] - b.h[i]) /
                            std::max(std::abs(b.h[i]), 1e-300));
  for (std::size_t e = 0; e < a.u.size(); ++e)
    rel = std::max(rel, std::abs(a.u[e] - b.u[e]) /
                            std::max(std::abs(b.u[e]), 1.0));
  return rel;
}

bool criterion_reduction(const Fixture& fx, std::string& detail) {
  const TestCaseConfig tc;
  double worst = 0.0;
  for (int order : {2, 3}) {
    SchemeConfig lts;
    lts.scheme = order == 2 ? Scheme::LTS2 : Scheme::LTS3;
    lts.dt = 50.0;
    lts.substeps = 1;
    SchemeConfig uni;
    uni.scheme = order == 2 ? Scheme::SSPRK2 : Scheme::SSPRK3;
    uni.dt = 50.0;
    const SimulationResult a =
        run_simulation(fx.mesh, &fx.map, nullptr, lts, tc, 1000.0);
    const SimulationResult b =
        run_simulation(fx.mesh, nullptr, nullptr, uni, tc, 1000.0);
    worst = std::max(worst, state_max_rel(a.state, b.state));
  }
  detail = "cells=" + std::to_string(fx.mesh.n_cells) +
           " max_rel=" + fmt("%.3e", worst) + " limit 1e-12";
  return worst <= 1e-12;
}

bool criterion_convergence(const Fixture& fx, std::string& detail) {
  const TestCaseConfig tc;
  const std::vector<double> dts{200.0, 100.0, 50.0, 25.0};
  struct Probe {
    Scheme scheme;
    int M;
    double target, window;
  };
  const std::vector<Probe> probes{{Scheme::LTS2, 1, 2.0, 0.25},
                                  {Scheme::LTS2, 4, 2.0, 0.25},
                                  {Scheme::LTS3, 1, 3.0, 0.4},
                                  {Scheme::LTS3, 4, 3.0, 0.4}};
  bool ok = true;
  for (const Probe& p : probes) {
    const ConvergenceResult res =
        convergence_study(fx.mesh, &fx.map, p.scheme, p.M, dts, 1000.0, tc);
    const bool in_h = std::abs(res.slope_h - p.target) <= p.window;
    const bool in_u = std::abs(res.slope_u - p.target) <= p.window;
    ok = ok && in_h && in_u;
    detail += std::string(scheme_name(p.scheme)) + " M=" +
              std::to_string(p.M) + " h=" + fmt("%.2f", res.slope_h) +
              " u=" + fmt("%.2f", res.slope_u) + "; ";
  }
  detail += "windows 2.0+-0.25 / 3.0+-0.4";
  return ok;
}

bool criterion_mass(const Fixture& fx, std::string& detail) {
  const TestCaseConfig tc;
  const Tc5Init init = init_tc5(fx.mesh, tc);
  const double mass0 = total_mass(fx.mesh, init.state.h);
  double worst = 0.0;
  for (Scheme s : {Scheme::LTS2, Scheme::LTS3})
    for (int M : {2, 4}) {
      SchemeConfig cfg;
      cfg.scheme = s;
      cfg.dt = 100.0;
      cfg.substeps = M;
      const SimulationResult r =
          run_simulation(fx.mesh, &fx.map, nullptr, cfg, tc, 10000.0);
      const double drift =
          std::abs(total_mass(fx.mesh, r.state.h) - mass0) / mass0;
      worst = std::max(worst, drift);
    }
  detail = "worst |drift|=" + fmt("%.3e", worst) + " over 100 steps, limit 1e-11";
  return worst <= 1e-11;
}

bool criterion_ratio_arithmetic(std::string& detail) {
  const double r = optimal_ratio(621007, 474467, 146540, 4);
  const double g = gain_percent(2132.285, 650.889);
  detail = "optimal_ratio=" + fmt("%.4f", r) + " (want 2.342+-0.001), gain=" +
           fmt("%.4f", g) + " (want 69.474+-0.001)";
  return std::abs(r - 2.342) <= 0.001 && std::abs(g - 69.474) <= 0.001;
}

bool criterion_ledger_speedup(const Fixture& fx, std::string& detail) {
  const TestCaseConfig tc;
  const int M = 4;
  const long long n_fine = fx.map.n_fine();
  const long long n_coarse_dt =
      fx.map.n_if1() + fx.map.n_if2() + fx.map.n_coarse();
  const double opt =
      optimal_ratio(fx.mesh.n_cells, n_coarse_dt, n_fine, M);

  SchemeConfig fast;
  fast.scheme = Scheme::LTS3;
  fast.dt = 100.0;
  fast.substeps = M;
  SchemeConfig slow = fast;
  slow.dt = fast.dt / M;
  slow.substeps = 1;
  const SimulationResult rf =
      run_simulation(fx.mesh, &fx.map, nullptr, fast, tc, 2000.0);
  const SimulationResult rs =
      run_simulation(fx.mesh, &fx.map, nullptr, slow, tc, 2000.0);
  const double measured = ledger_work_ratio(rs.ledger, rf.ledger);
  const double frac = measured / opt;
  const double ccf = mesh_metrics(fx.mesh, &fx.map).coarse_fine_ratio;
  detail = "C_cf=" + fmt("%.2f", ccf) + " optimal=" + fmt("%.3f", opt) +
           " measured=" + fmt("%.3f", measured) + " fraction=" +
           fmt("%.3f", frac) + " (want 0.8..1.0)";
  return frac >= 0.8 && frac <= 1.0;
}

bool criterion_rank_bitwise(const Fixture& fx, std::string& detail) {
  const TestCaseConfig tc;
  const Tc5Init init = init_tc5(fx.mesh, tc);
  SchemeConfig cfg;
  cfg.scheme = Scheme::LTS3;
  cfg.dt = 100.0;
  cfg.substeps = 2;
  const int n_steps = 5;

  SerialEvaluator serial_eval(fx.mesh, &fx.map, init.b, init.f, cfg.gravity);
  Stepper serial(fx.mesh, &fx.map, serial_eval, nullptr, 1);
  std::vector<State> reference;
  State s = init.state;
  for (int k = 0; k < n_steps; ++k) {
    serial.step(s, cfg);
    reference.push_back(s);
  }

  const CellGraph graph = build_cell_graph(fx.mesh, &fx.map);
  for (int n_ranks : {1, 2, 4}) {
    const std::vector<int> labels =
        partition_multiconstraint(graph, n_ranks, 12345u, nullptr);
    const PartitionPlan plan =
        make_block_plan(fx.mesh, fx.map, labels, n_ranks);
    ThreadedEvaluator pool(fx.mesh, fx.map, plan, init.b, init.f, cfg.gravity);
    Stepper threaded(fx.mesh, &fx.map, pool, nullptr, 1);
    State t = init.state;
    for (int k = 0; k < n_steps; ++k) {
      threaded.step(t, cfg);
      if (t.h.data != reference[k].h.data || t.u.data != reference[k].u.data) {
        detail = "rank count " + std::to_string(n_ranks) +
                 " diverged at step " + std::to_string(k + 1);
        return false;
      }
    }
  }
  detail = "ranks {1,2,4} bitwise equal to serial over " +
           std::to_string(n_steps) + " steps";
  return true;
}

bool criterion_operator_oracles(std::string& detail) {
  const VoronoiMesh mesh = generate_icosphere_mesh(0, 0, kRadius);
  const CellField h = oracles::random_cell_field(mesh, 101, 900.0, 1100.0);
  const EdgeField u = oracles::random_edge_field(mesh, 103, -25.0, 25.0);
  const VertexField f = oracles::random_vertex_field(mesh, 107, -1e-4, 1e-4);
  const EdgeField F = thickness_to_edge(mesh, h);

  double worst = 0.0;
  worst = std::max(worst, oracles::max_rel_diff(divergence(mesh, F),
                                                oracles::divergence(mesh, F)));
  worst = std::max(worst, oracles::max_rel_diff(gradient(mesh, h),
                                                oracles::gradient(mesh, h)));
  worst = std::max(worst,
                   oracles::max_rel_diff(kinetic_energy(mesh, u),
                                         oracles::kinetic_energy(mesh, u)));
  const VertexField q = vorticity_and_pv(mesh, h, u, f);
  worst = std::max(
      worst, oracles::max_rel_diff(q, oracles::potential_vorticity(mesh, h, u, f)));
  worst = std::max(worst, oracles::max_scaled_diff(
                              pv_flux_term(mesh, q, F),
                              oracles::pv_flux_term(mesh, q, F)));
  const bool ops_ok = worst <= 1e-13;

  // Flux-rotation weights: swapping the edge pair flips the sign.
  double w_worst = 0.0;
  for (int e = 0; e < mesh.n_edges; ++e) {
    const auto nbs = mesh.perp_edges(e);
    const auto ws = mesh.perp_weights(e);
    for (std::size_t k = 0; k < nbs.size(); ++k) {
      const int e2 = nbs[k];
      const auto nbs2 = mesh.perp_edges(e2);
      const auto ws2 = mesh.perp_weights(e2);
      double back = 0.0;
      for (std::size_t k2 = 0; k2 < nbs2.size(); ++k2)
        if (nbs2[k2] == e) back = ws2[k2];
      w_worst = std::max(w_worst, std::abs(ws[k] + back));
    }
  }
  const bool w_ok = w_worst <= 1e-12;

  // Kite areas partition both the cells and the dual vertices.
  double k_worst = 0.0;
  for (int i = 0; i < mesh.n_cells; ++i) {
    double s = 0.0;
    for (int j = 0; j < mesh.ring_size(i); ++j)
      s += mesh.kite_area[mesh.cell_offset[i] + j];
    k_worst = std::max(k_worst, std::abs(s - mesh.cell_area[i]) / mesh.cell_area[i]);
  }
  for (int v = 0; v < mesh.n_vertices; ++v) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += mesh.vertex_kite[v][k];
    k_worst = std::max(k_worst,
                       std::abs(s - mesh.vertex_area[v]) / mesh.vertex_area[v]);
  }
  const bool k_ok = k_worst <= 1e-12;

  detail = "op max_rel=" + fmt("%.2e", worst) + " (limit 1e-13), antisym=" +
           fmt("%.2e", w_worst) + ", kite=" + fmt("%.2e", k_worst) +
           " (limits 1e-12)";
  return ops_ok && w_ok && k_ok;
}

std::vector<int> two_hop_neighborhood(const VoronoiMesh& mesh,
                                      const std::vector<int>& owned) {
  std::vector<char> in_owned(mesh.n_cells, 0), seen(mesh.n_cells, 0);
  for (int c : owned) in_owned[c] = seen[c] = 1;
  std::deque<std::pair<int, int>> q;
  for (int c : owned) q.emplace_back(c, 0);
  std::vector<int> out;
  while (!q.empty()) {
    auto [c, d] = q.front();
    q.pop_front();
    if (d == 2) continue;
    const int off = mesh.cell_offset[c];
    for (int j = 0; j < mesh.ring_size(c); ++j) {
      const int nb = mesh.cell_cells[off + j];
      if (seen[nb]) continue;
      seen[nb] = 1;
      if (!in_owned[nb]) out.push_back(nb);
      q.emplace_back(nb, d + 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool criterion_partition(const Fixture& fx, std::string& detail) {
  auto cell_class = [&](int c) {
    const CellRegion l = fx.map.cell_label[c];
    if (l == CellRegion::Fine) return 0;
    if (l == CellRegion::Coarse) return 1;
    return 2;
  };
  const CellGraph graph = build_cell_graph(fx.mesh, &fx.map);
  for (int n_ranks : {1, 2, 4}) {
    const std::vector<int> labels =
        partition_multiconstraint(graph, n_ranks, 777u, nullptr);
    const PartitionPlan plan = make_block_plan(fx.mesh, fx.map, labels, n_ranks);

    if (plan.n_blocks != 3 * n_ranks) {
      detail = "wrong block count for N=" + std::to_string(n_ranks);
      return false;
    }
    std::vector<int> cell_owner(fx.mesh.n_cells, -1);
    std::vector<int> edge_owner(fx.mesh.n_edges, -1);
    for (int b = 0; b < plan.n_blocks; ++b) {
      for (int c : plan.owned_cells[b]) {
        if (cell_owner[c] != -1 || cell_class(c) != b % 3) {
          detail = "cell ownership broken in block " + std::to_string(b);
          return false;
        }
        cell_owner[c] = b;
      }
      for (int e : plan.owned_edges[b]) {
        if (edge_owner[e] != -1) {
          detail = "edge owned twice, block " + std::to_string(b);
          return false;
        }
        edge_owner[e] = b;
      }
      const std::vector<int> want =
          two_hop_neighborhood(fx.mesh, plan.owned_cells[b]);
      if (plan.halo_cells[b] != want) {
        detail = "halo of block " + std::to_string(b) +
                 " is not the two-hop neighborhood";
        return false;
      }
    }
    for (int c = 0; c < fx.mesh.n_cells; ++c)
      if (cell_owner[c] == -1 || cell_owner[c] != plan.block_of_cell[c]) {
        detail = "cell " + std::to_string(c) + " not covered";
        return false;
      }
    for (int e = 0; e < fx.mesh.n_edges; ++e)
      if (edge_owner[e] == -1) {
        detail = "edge " + std::to_string(e) + " not covered";
        return false;
      }

    const PartitionPlan conc = concentrate_interface(fx.mesh, fx.map, plan);
    const ImbalanceReport rep = imbalance_metrics(conc, fx.map);
    if (std::abs(rep.interface_ratio - double(n_ranks)) > 1e-9) {
      detail = "concentrated interface ratio " + fmt("%.3f", rep.interface_ratio) +
               " != " + std::to_string(n_ranks);
      return false;
    }
  }
  detail = "purity, coverage, two-hop halos and concentrated-interface ratio "
           "hold for N in {1,2,4}";
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance: building fixture (level %d, refine x%d, cap %.2f)\n",
              kLevel, kFactor, kCapRadius);
  std::fflush(stdout);
  const Fixture fx = build_fixture();
  std::printf("acceptance: mesh has %d cells, %d edges; regions %d/%d/%d/%d\n",
              fx.mesh.n_cells, fx.mesh.n_edges, fx.map.n_fine(),
              fx.map.n_if1(), fx.map.n_if2(), fx.map.n_coarse());
  std::fflush(stdout);

  run_criterion(1, "multirate with M=1 reduces to the single-rate schemes",
                [&](std::string& d) { return criterion_reduction(fx, d); });
  run_criterion(2, "temporal convergence orders",
                [&](std::string& d) { return criterion_convergence(fx, d); });
  run_criterion(3, "mass conservation",
                [&](std::string& d) { return criterion_mass(fx, d); });
  run_criterion(4, "speedup bound and gain arithmetic",
                [&](std::string& d) { return criterion_ratio_arithmetic(d); });
  run_criterion(5, "measured work saving approaches the bound",
                [&](std::string& d) { return criterion_ledger_speedup(fx, d); });
  run_criterion(6, "emulated ranks reproduce serial runs bitwise",
                [&](std::string& d) { return criterion_rank_bitwise(fx, d); });
  run_criterion(7, "discrete operators match independent oracles",
                [&](std::string& d) { return criterion_operator_oracles(d); });
  run_criterion(8, "region-pure partitions with two-layer halos",
                [&](std::string& d) { return criterion_partition(fx, d); });

  if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
  else std::printf("acceptance: %d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

#include "mswm/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>

#include "mswm/errors.hpp"

namespace mswm {

namespace {

// Shared combine loops.  The LTS substeps and the plain SSPRK stages must go
// through the same expressions so that an M=1 LTS step reproduces the global
// scheme to round-off.
inline void euler_combine(std::span<const int> ids, const double* y,
                          const double* d, double dt, double* out) {
  for (int i : ids) out[i] = y[i] + dt * d[i];
}

inline void euler_combine_n(std::size_t n, const double* y, const double* d,
                            double dt, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + dt * d[i];
}

inline void weighted_combine(std::span<const int> ids, double w_old,
                             const double* y_old, double w_stage,
                             const double* y_stage, double w_rhs, double dt,
                             const double* d, double* out) {
  for (int i : ids)
    out[i] = w_old * y_old[i] + w_stage * y_stage[i] + w_rhs * dt * d[i];
}

inline void weighted_combine_n(std::size_t n, double w_old,
                               const double* y_old, double w_stage,
                               const double* y_stage, double w_rhs, double dt,
                               const double* d, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = w_old * y_old[i] + w_stage * y_stage[i] + w_rhs * dt * d[i];
}

inline void accumulate(std::span<const int> ids, const double* d,
                       double* acc) {
  for (int i : ids) acc[i] += d[i];
}

inline void copy_over(std::span<const int> ids, const double* src,
                      double* dst) {
  for (int i : ids) dst[i] = src[i];
}

std::vector<int> merge_sorted(std::initializer_list<std::span<const int>>
                                  lists) {
  std::vector<int> out;
  std::size_t total = 0;
  for (auto& l : lists) total += l.size();
  out.reserve(total);
  for (auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "ssprk2") return Scheme::SSPRK2;
  if (name == "ssprk3") return Scheme::SSPRK3;
  if (name == "rk4") return Scheme::RK4;
  if (name == "lts2") return Scheme::LTS2;
  if (name == "lts3") return Scheme::LTS3;
  throw ConfigError("unknown scheme '" + name +
                    "' (expected ssprk2, ssprk3, rk4, lts2 or lts3)");
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::SSPRK2:
      return "ssprk2";
    case Scheme::SSPRK3:
      return "ssprk3";
    case Scheme::RK4:
      return "rk4";
    case Scheme::LTS2:
      return "lts2";
    case Scheme::LTS3:
      return "lts3";
  }
  return "?";
}

bool scheme_is_lts(Scheme s) {
  return s == Scheme::LTS2 || s == Scheme::LTS3;
}

int scheme_stage_count(Scheme s) {
  switch (s) {
    case Scheme::SSPRK2:
    case Scheme::LTS2:
      return 2;
    case Scheme::SSPRK3:
    case Scheme::LTS3:
      return 3;
    case Scheme::RK4:
      return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// SerialEvaluator

SerialEvaluator::SerialEvaluator(const VoronoiMesh& mesh, const RegionMap* map,
                                 const CellField& b,
                                 const VertexField& f_vertex, double gravity,
                                 int replication)
    : mesh_(mesh),
      map_(map),
      b_(b.ptr()),
      f_(f_vertex.ptr()),
      gravity_(gravity),
      replication_(replication) {
  if (b.size() != static_cast<std::size_t>(mesh.n_cells))
    throw UsageError("bottom topography field size does not match the mesh");
  if (f_vertex.size() != static_cast<std::size_t>(mesh.n_vertices))
    throw UsageError("Coriolis field size does not match the mesh");
  if (replication < 1)
    throw ConfigError("cost replication factor must be >= 1");
  scratch_.bind(mesh);
}

const std::pair<std::vector<int>, std::vector<int>>& SerialEvaluator::sets_for(
    unsigned mask) {
  auto it = set_cache_.find(mask);
  if (it != set_cache_.end()) return it->second;

  std::pair<std::vector<int>, std::vector<int>> sets;
  if (!map_) {
    if (mask != kMaskAll)
      throw UsageError(
          "partial evaluation masks require a region map on the evaluator");
    sets.first.resize(mesh_.n_cells);
    std::iota(sets.first.begin(), sets.first.end(), 0);
    sets.second.resize(mesh_.n_edges);
    std::iota(sets.second.begin(), sets.second.end(), 0);
  } else {
    std::vector<std::span<const int>> cell_lists, edge_lists;
    auto add = [&](unsigned bit, const std::vector<int>& list, bool is_cell) {
      if (mask & bit) (is_cell ? cell_lists : edge_lists).emplace_back(list);
    };
    add(kCellsFinePlain, map_->cells_fine_plain, true);
    add(kCellsUF1, map_->cells_uf1, true);
    add(kCellsUF2, map_->cells_uf2, true);
    add(kCellsIf1, map_->cells_if1, true);
    add(kCellsIf2, map_->cells_if2, true);
    add(kCellsCoarse, map_->cells_coarse, true);
    add(kEdgesFinePlain, map_->edges_fine, false);
    add(kEdgesUFine, map_->edges_ufine, false);
    add(kEdgesIf1, map_->edges_if1, false);
    add(kEdgesIf2, map_->edges_if2, false);
    add(kEdgesCoarse, map_->edges_coarse, false);
    for (auto& l : cell_lists)
      sets.first.insert(sets.first.end(), l.begin(), l.end());
    for (auto& l : edge_lists)
      sets.second.insert(sets.second.end(), l.begin(), l.end());
    std::sort(sets.first.begin(), sets.first.end());
    std::sort(sets.second.begin(), sets.second.end());
  }
  return set_cache_.emplace(mask, std::move(sets)).first->second;
}

void SerialEvaluator::eval(const double* h, const double* u, unsigned mask,
                           double* dh, double* du) {
  const auto& sets = sets_for(mask);
  ElementSets es;
  es.cells = sets.first;
  es.edges = sets.second;
  shallow_water_tendencies(mesh_, h, u, b_, f_, gravity_, es, dh, du, scratch_,
                           replication_);
}

// ---------------------------------------------------------------------------
// Prediction coefficients

LtsCoeffs lts_interp_coeffs(int order, int stage, int k, int M) {
  if (order != 2 && order != 3)
    throw UsageError("prediction coefficients: order must be 2 or 3");
  if (stage < 1 || stage > order)
    throw UsageError("prediction coefficients: stage out of range for order");
  if (M < 1) throw UsageError("prediction coefficients: M must be >= 1");
  if (k < 0 || k >= M)
    throw UsageError("prediction coefficients: substep index out of range");

  const double kd = k, Md = M;
  double x = 0.0, xt = 0.0;
  switch (stage) {
    case 1:
      x = kd / Md;
      xt = (order == 3) ? (kd * kd) / (Md * Md) : 0.0;
      break;
    case 2:
      x = (kd + 1.0) / Md;
      xt = (order == 3) ? (kd * (kd + 2.0)) / (Md * Md) : 0.0;
      break;
    case 3:
      x = (2.0 * kd + 1.0) / (2.0 * Md);
      xt = (2.0 * kd * kd + 2.0 * kd + 1.0) / (2.0 * Md * Md);
      break;
  }
  return {1.0 - x - xt, x - xt, 2.0 * xt};
}

namespace {

// Writes the interface-1 prediction for the given stage/substep into out.
void apply_prediction(int order, int stage, int k, int M,
                      std::span<const int> ids, const double* y_old,
                      const double* y1, const double* y2, double* out) {
  const LtsCoeffs c = lts_interp_coeffs(order, stage, k, M);
  if (order == 2) {
    for (int i : ids) out[i] = c.w_old * y_old[i] + c.w_first * y1[i];
  } else {
    for (int i : ids)
      out[i] = c.w_old * y_old[i] + c.w_first * y1[i] + c.w_second * y2[i];
  }
}

}  // namespace

void apply_interface_correction(const RegionMap& map, int order, double dt,
                                int M, const double* h_old,
                                const double* u_old, const LtsWorkspace& ws,
                                double* h_out, double* u_out) {
  if (ws.acc_count != M) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "interface correction needs exactly %d accumulated "
                  "evaluations per stage, have %d",
                  M, ws.acc_count);
    throw UsageError(msg);
  }
  const double delta = dt / M;
  const double t1 = (order == 2) ? 0.5 : 1.0 / 6.0;
  const double t2 = (order == 2) ? 0.5 : 1.0 / 6.0;
  const double t3 = (order == 2) ? 0.0 : 2.0 / 3.0;

  auto correct_cells = [&](std::span<const int> ids) {
    if (order == 2) {
      for (int i : ids)
        h_out[i] = h_old[i] +
                   delta * (t1 * ws.acc_h1[i] + t2 * ws.acc_h2[i]);
    } else {
      for (int i : ids)
        h_out[i] = h_old[i] + delta * (t1 * ws.acc_h1[i] + t2 * ws.acc_h2[i] +
                                       t3 * ws.acc_h3[i]);
    }
  };
  auto correct_edges = [&](std::span<const int> ids) {
    if (order == 2) {
      for (int e : ids)
        u_out[e] = u_old[e] +
                   delta * (t1 * ws.acc_u1[e] + t2 * ws.acc_u2[e]);
    } else {
      for (int e : ids)
        u_out[e] = u_old[e] + delta * (t1 * ws.acc_u1[e] + t2 * ws.acc_u2[e] +
                                       t3 * ws.acc_u3[e]);
    }
  };
  correct_cells(map.cells_if1);
  correct_cells(map.cells_if2);
  correct_edges(map.edges_if1);
  correct_edges(map.edges_if2);
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(const VoronoiMesh& mesh, const RegionMap* map,
                 TendencyEvaluator& evaluator, WorkLedger* ledger,
                 int replication)
    : mesh_(mesh),
      map_(map),
      evaluator_(evaluator),
      ledger_(ledger),
      replication_(replication),
      ws_(mesh.n_cells, mesh.n_edges),
      h_tmp_(mesh.n_cells),
      h_acc_(mesh.n_cells),
      u_tmp_(mesh.n_edges),
      u_acc_(mesh.n_edges) {
  if (replication_ < 1)
    throw ConfigError("cost replication factor must be >= 1");
}

void Stepper::evaluate(const double* h, const double* u, unsigned mask,
                       int stage) {
  evaluator_.eval(h, u, mask, ws_.dh.ptr(), ws_.du.ptr());
  tally(mask, stage);
}

void Stepper::tally(unsigned mask, int stage) {
  if (!ledger_) return;
  const std::int64_t L = replication_;
  if (!map_) {
    if (mask & kCellsAll)
      ledger_->add_cells(kLedgerFine, stage,
                         L * static_cast<std::int64_t>(mesh_.n_cells));
    if (mask & kEdgesAll)
      ledger_->add_edges(kLedgerFine, stage,
                         L * static_cast<std::int64_t>(mesh_.n_edges));
    return;
  }
  auto cells = [&](unsigned bit, const std::vector<int>& list, int region) {
    if (mask & bit)
      ledger_->add_cells(region, stage,
                         L * static_cast<std::int64_t>(list.size()));
  };
  auto edges = [&](unsigned bit, const std::vector<int>& list, int region) {
    if (mask & bit)
      ledger_->add_edges(region, stage,
                         L * static_cast<std::int64_t>(list.size()));
  };
  cells(kCellsFinePlain, map_->cells_fine_plain, kLedgerFine);
  cells(kCellsUF1, map_->cells_uf1, kLedgerFine);
  cells(kCellsUF2, map_->cells_uf2, kLedgerFine);
  cells(kCellsIf1, map_->cells_if1, kLedgerInterface1);
  cells(kCellsIf2, map_->cells_if2, kLedgerInterface2);
  cells(kCellsCoarse, map_->cells_coarse, kLedgerCoarse);
  edges(kEdgesFinePlain, map_->edges_fine, kLedgerFine);
  edges(kEdgesUFine, map_->edges_ufine, kLedgerFine);
  edges(kEdgesIf1, map_->edges_if1, kLedgerInterface1);
  edges(kEdgesIf2, map_->edges_if2, kLedgerInterface2);
  edges(kEdgesCoarse, map_->edges_coarse, kLedgerCoarse);
}

void Stepper::ssprk_step(int order, State& state, double dt) {
  if (order != 2 && order != 3)
    throw UsageError("ssprk_step: order must be 2 or 3");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const std::size_t nc = mesh_.n_cells, ne = mesh_.n_edges;
  double* h = state.h.ptr();
  double* u = state.u.ptr();
  double* h1 = ws_.h1.ptr();
  double* u1 = ws_.u1.ptr();
  double* dh = ws_.dh.ptr();
  double* du = ws_.du.ptr();

  evaluate(h, u, kMaskAll, 0);
  euler_combine_n(nc, h, dh, dt, h1);
  euler_combine_n(ne, u, du, dt, u1);

  evaluate(h1, u1, kMaskAll, 1);
  if (order == 2) {
    weighted_combine_n(nc, 0.5, h, 0.5, h1, 0.5, dt, dh, h);
    weighted_combine_n(ne, 0.5, u, 0.5, u1, 0.5, dt, du, u);
  } else {
    double* h2 = ws_.h2.ptr();
    double* u2 = ws_.u2.ptr();
    weighted_combine_n(nc, 0.75, h, 0.25, h1, 0.25, dt, dh, h2);
    weighted_combine_n(ne, 0.75, u, 0.25, u1, 0.25, dt, du, u2);
    evaluate(h2, u2, kMaskAll, 2);
    weighted_combine_n(nc, 1.0 / 3.0, h, 2.0 / 3.0, h2, 2.0 / 3.0, dt, dh, h);
    weighted_combine_n(ne, 1.0 / 3.0, u, 2.0 / 3.0, u2, 2.0 / 3.0, dt, du, u);
  }
  state.time += dt;
  if (ledger_) ++ledger_->steps_taken;
}

void Stepper::rk4_step(State& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const std::size_t nc = mesh_.n_cells, ne = mesh_.n_edges;
  double* h = state.h.ptr();
  double* u = state.u.ptr();
  double* ht = h_tmp_.ptr();
  double* ut = u_tmp_.ptr();
  double* ha = h_acc_.ptr();
  double* ua = u_acc_.ptr();
  double* dh = ws_.dh.ptr();
  double* du = ws_.du.ptr();
  const double half = 0.5 * dt;

  evaluate(h, u, kMaskAll, 0);
  for (std::size_t i = 0; i < nc; ++i) ha[i] = dh[i];
  for (std::size_t e = 0; e < ne; ++e) ua[e] = du[e];
  euler_combine_n(nc, h, dh, half, ht);
  euler_combine_n(ne, u, du, half, ut);

  evaluate(ht, ut, kMaskAll, 1);
  for (std::size_t i = 0; i < nc; ++i) ha[i] += 2.0 * dh[i];
  for (std::size_t e = 0; e < ne; ++e) ua[e] += 2.0 * du[e];
  euler_combine_n(nc, h, dh, half, ht);
  euler_combine_n(ne, u, du, half, ut);

  evaluate(ht, ut, kMaskAll, 2);
  for (std::size_t i = 0; i < nc; ++i) ha[i] += 2.0 * dh[i];
  for (std::size_t e = 0; e < ne; ++e) ua[e] += 2.0 * du[e];
  euler_combine_n(nc, h, dh, dt, ht);
  euler_combine_n(ne, u, du, dt, ut);

  evaluate(ht, ut, kMaskAll, 3);
  for (std::size_t i = 0; i < nc; ++i) ha[i] += dh[i];
  for (std::size_t e = 0; e < ne; ++e) ua[e] += du[e];

  const double sixth = dt / 6.0;
  for (std::size_t i = 0; i < nc; ++i) h[i] += sixth * ha[i];
  for (std::size_t e = 0; e < ne; ++e) u[e] += sixth * ua[e];
  state.time += dt;
  if (ledger_) ++ledger_->steps_taken;
}

void Stepper::lts_step(int order, State& state, double dt, int substeps) {
  if (order != 2 && order != 3)
    throw UsageError("lts_step: order must be 2 or 3");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (substeps < 1) throw ConfigError("substep count must be >= 1");
  if (!map_)
    throw ConfigError("local time stepping requires a region map");
  if (order == 3 && !map_->sublabels_assigned)
    throw ConfigError(
        "third-order local time stepping requires underline-fine sublabels");

  const int M = substeps;
  const double delta = dt / M;
  const RegionMap& map = *map_;

  // Group unions (ascending).  Built per call; the sort cost is negligible
  // next to one tendency evaluation.
  const std::vector<int> step1_cells =
      (order == 2)
          ? merge_sorted({map.cells_if1, map.cells_if2, map.cells_coarse})
          : merge_sorted({map.cells_uf1, map.cells_uf2, map.cells_if1,
                          map.cells_if2, map.cells_coarse});
  const std::vector<int> step1_edges =
      (order == 2)
          ? merge_sorted({map.edges_if1, map.edges_if2, map.edges_coarse})
          : merge_sorted({map.edges_ufine, map.edges_if1, map.edges_if2,
                          map.edges_coarse});
  const std::vector<int> step2_cells =
      merge_sorted({map.cells_if1, map.cells_if2, map.cells_coarse});
  const std::vector<int> step2_edges =
      merge_sorted({map.edges_if1, map.edges_if2, map.edges_coarse});
  const std::vector<int> fine_cells = merge_sorted(
      {map.cells_fine_plain, map.cells_uf1, map.cells_uf2});
  const std::vector<int> fine_edges =
      merge_sorted({map.edges_fine, map.edges_ufine});
  const std::vector<int> if_cells =
      merge_sorted({map.cells_if1, map.cells_if2});
  const std::vector<int> if_edges =
      merge_sorted({map.edges_if1, map.edges_if2});

  const unsigned mask_coarse_only = kCellsCoarse | kEdgesCoarse;
  const unsigned mask_if_coarse = kCellsIf1 | kCellsIf2 | kCellsCoarse |
                                  kEdgesIf1 | kEdgesIf2 | kEdgesCoarse;
  const unsigned mask_step1 =
      (order == 2) ? mask_if_coarse
                   : (mask_if_coarse | kCellsUF1 | kCellsUF2 | kEdgesUFine);
  const unsigned mask_step2 = (order == 2) ? mask_coarse_only : mask_if_coarse;
  const unsigned mask_sub = kCellsFinePlain | kCellsUF1 | kCellsUF2 |
                            kCellsIf1 | kCellsIf2 | kEdgesFinePlain |
                            kEdgesUFine | kEdgesIf1 | kEdgesIf2;

  const std::size_t nc = mesh_.n_cells, ne = mesh_.n_edges;
  const double* h_old = state.h.ptr();
  const double* u_old = state.u.ptr();
  double* h1 = ws_.h1.ptr();
  double* u1 = ws_.u1.ptr();
  double* h2 = ws_.h2.ptr();
  double* u2 = ws_.u2.ptr();
  double* ha = ws_.ha.ptr();
  double* ua = ws_.ua.ptr();
  double* hb = ws_.hb.ptr();
  double* ub = ws_.ub.ptr();
  double* hc = ws_.hc.ptr();
  double* uc = ws_.uc.ptr();
  double* dh = ws_.dh.ptr();
  double* du = ws_.du.ptr();
  double* ht = h_tmp_.ptr();
  double* ut = u_tmp_.ptr();

  // Step 1: first stage with the coarse step on interfaces and coarse (and,
  // third order, the two underline-fine layers).
  evaluate(h_old, u_old, mask_step1, 0);
  std::copy_n(h_old, nc, h1);
  std::copy_n(u_old, ne, u1);
  euler_combine(step1_cells, h_old, dh, dt, h1);
  euler_combine(step1_edges, u_old, du, dt, u1);

  // Step 2: second stage.  Second order finalizes the coarse region here;
  // third order advances interfaces and coarse to their second-stage values.
  evaluate(h1, u1, mask_step2, 1);
  if (order == 2) {
    weighted_combine(map.cells_coarse, 0.5, h_old, 0.5, h1, 0.5, dt, dh, ht);
    weighted_combine(map.edges_coarse, 0.5, u_old, 0.5, u1, 0.5, dt, du, ut);
  } else {
    std::copy_n(h1, nc, h2);
    std::copy_n(u1, ne, u2);
    weighted_combine(step2_cells, 0.75, h_old, 0.25, h1, 0.25, dt, dh, h2);
    weighted_combine(step2_edges, 0.75, u_old, 0.25, u1, 0.25, dt, du, u2);
  }

  // Step 3: fine substeps.  Stage arrays hold, per stage, the fine substep
  // solution, the interface-1 prediction, and frozen stage values on
  // interface 2 and coarse, so every evaluation sees a consistent state.
  std::copy_n(h_old, nc, ha);
  std::copy_n(u_old, ne, ua);
  std::copy_n(h1, nc, hb);
  std::copy_n(u1, ne, ub);
  if (order == 3) {
    std::copy_n(h2, nc, hc);
    std::copy_n(u2, ne, uc);
  }
  std::fill(ws_.acc_h1.data.begin(), ws_.acc_h1.data.end(), 0.0);
  std::fill(ws_.acc_h2.data.begin(), ws_.acc_h2.data.end(), 0.0);
  std::fill(ws_.acc_h3.data.begin(), ws_.acc_h3.data.end(), 0.0);
  std::fill(ws_.acc_u1.data.begin(), ws_.acc_u1.data.end(), 0.0);
  std::fill(ws_.acc_u2.data.begin(), ws_.acc_u2.data.end(), 0.0);
  std::fill(ws_.acc_u3.data.begin(), ws_.acc_u3.data.end(), 0.0);
  ws_.acc_count = 0;

  for (int k = 0; k < M; ++k) {
    apply_prediction(order, 1, k, M, map.cells_if1, h_old, h1, h2, ha);
    apply_prediction(order, 1, k, M, map.edges_if1, u_old, u1, u2, ua);
    evaluate(ha, ua, mask_sub, 0);
    accumulate(if_cells, dh, ws_.acc_h1.ptr());
    accumulate(if_edges, du, ws_.acc_u1.ptr());
    euler_combine(fine_cells, ha, dh, delta, hb);
    euler_combine(fine_edges, ua, du, delta, ub);

    apply_prediction(order, 2, k, M, map.cells_if1, h_old, h1, h2, hb);
    apply_prediction(order, 2, k, M, map.edges_if1, u_old, u1, u2, ub);
    evaluate(hb, ub, mask_sub, 1);
    accumulate(if_cells, dh, ws_.acc_h2.ptr());
    accumulate(if_edges, du, ws_.acc_u2.ptr());

    if (order == 2) {
      weighted_combine(fine_cells, 0.5, ha, 0.5, hb, 0.5, delta, dh, ha);
      weighted_combine(fine_edges, 0.5, ua, 0.5, ub, 0.5, delta, du, ua);
    } else {
      weighted_combine(fine_cells, 0.75, ha, 0.25, hb, 0.25, delta, dh, hc);
      weighted_combine(fine_edges, 0.75, ua, 0.25, ub, 0.25, delta, du, uc);
      apply_prediction(order, 3, k, M, map.cells_if1, h_old, h1, h2, hc);
      apply_prediction(order, 3, k, M, map.edges_if1, u_old, u1, u2, uc);
      evaluate(hc, uc, mask_sub, 2);
      accumulate(if_cells, dh, ws_.acc_h3.ptr());
      accumulate(if_edges, du, ws_.acc_u3.ptr());
      weighted_combine(fine_cells, 1.0 / 3.0, ha, 2.0 / 3.0, hc, 2.0 / 3.0,
                       delta, dh, ha);
      weighted_combine(fine_edges, 1.0 / 3.0, ua, 2.0 / 3.0, uc, 2.0 / 3.0,
                       delta, du, ua);
    }
    ++ws_.acc_count;
  }

  // Step 4: third stage on the coarse region (third order only; second order
  // already finalized it in step 2).
  if (order == 3) {
    evaluate(h2, u2, mask_coarse_only, 2);
    weighted_combine(map.cells_coarse, 1.0 / 3.0, h_old, 2.0 / 3.0, h2,
                     2.0 / 3.0, dt, dh, ht);
    weighted_combine(map.edges_coarse, 1.0 / 3.0, u_old, 2.0 / 3.0, u2,
                     2.0 / 3.0, dt, du, ut);
  }

  // Step 5: interface correction, then assemble the new state.
  apply_interface_correction(map, order, dt, M, h_old, u_old, ws_,
                             state.h.ptr(), state.u.ptr());
  copy_over(fine_cells, ha, state.h.ptr());
  copy_over(fine_edges, ua, state.u.ptr());
  copy_over(map.cells_coarse, ht, state.h.ptr());
  copy_over(map.edges_coarse, ut, state.u.ptr());

  state.time += dt;
  if (ledger_) ++ledger_->steps_taken;
}

void Stepper::step(State& state, const SchemeConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::SSPRK2:
      ssprk_step(2, state, cfg.dt);
      break;
    case Scheme::SSPRK3:
      ssprk_step(3, state, cfg.dt);
      break;
    case Scheme::RK4:
      rk4_step(state, cfg.dt);
      break;
    case Scheme::LTS2:
      lts_step(2, state, cfg.dt, cfg.substeps);
      break;
    case Scheme::LTS3:
      lts_step(3, state, cfg.dt, cfg.substeps);
      break;
  }
}

// ---------------------------------------------------------------------------
// One-shot convenience wrappers

State ssprk_step(int order, const VoronoiMesh& mesh, const State& state,
                 const SchemeConfig& cfg, const CellField& b,
                 const VertexField& f_vertex) {
  SerialEvaluator eval(mesh, nullptr, b, f_vertex, cfg.gravity,
                       cfg.replication);
  Stepper stepper(mesh, nullptr, eval, nullptr, cfg.replication);
  State out = state;
  stepper.ssprk_step(order, out, cfg.dt);
  return out;
}

State rk4_step(const VoronoiMesh& mesh, const State& state,
               const SchemeConfig& cfg, const CellField& b,
               const VertexField& f_vertex) {
  SerialEvaluator eval(mesh, nullptr, b, f_vertex, cfg.gravity,
                       cfg.replication);
  Stepper stepper(mesh, nullptr, eval, nullptr, cfg.replication);
  State out = state;
  stepper.rk4_step(out, cfg.dt);
  return out;
}

State lts_step(int order, const VoronoiMesh& mesh, const RegionMap& map,
               const State& state, const SchemeConfig& cfg, const CellField& b,
               const VertexField& f_vertex) {
  SerialEvaluator eval(mesh, &map, b, f_vertex, cfg.gravity, cfg.replication);
  Stepper stepper(mesh, &map, eval, nullptr, cfg.replication);
  State out = state;
  stepper.lts_step(order, out, cfg.dt, cfg.substeps);
  return out;
}

CourantNumbers courant_numbers(const VoronoiMesh& mesh, const RegionMap* map,
                               const EdgeField& u, double dt, int substeps) {
  if (u.size() != static_cast<std::size_t>(mesh.n_edges))
    throw UsageError("velocity field size does not match the mesh");
  if (substeps < 1) throw UsageError("substep count must be >= 1");
  CourantNumbers out;
  auto scan = [&](std::span<const int> ids, double step, double& target) {
    for (int e : ids) {
      const double c = step * std::abs(u[e]) / mesh.edge_dual_len[e];
      if (c > target) target = c;
    }
  };
  if (!map) {
    for (int e = 0; e < mesh.n_edges; ++e) {
      const double c = dt * std::abs(u[e]) / mesh.edge_dual_len[e];
      if (c > out.fine) out.fine = c;
    }
    out.coarse = out.fine;
    return out;
  }
  const double dt_fine = dt / substeps;
  scan(map->edges_fine, dt_fine, out.fine);
  scan(map->edges_ufine, dt_fine, out.fine);
  scan(map->edges_if1, dt, out.coarse);
  scan(map->edges_if2, dt, out.coarse);
  scan(map->edges_coarse, dt, out.coarse);
  return out;
}

}  // namespace mswm

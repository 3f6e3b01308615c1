#include "mswm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <numeric>

#include "mswm/errors.hpp"
#include "mswm/geometry.hpp"
#include "mswm/operators.hpp"
#include "mswm/rank_pool.hpp"

namespace mswm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void append_csv_value(std::string& out, double v, bool last) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
  out += last ? '\n' : ',';
}

}  // namespace

Tc5Init init_tc5(const VoronoiMesh& mesh, const TestCaseConfig& cfg) {
  if (!(cfg.r_mnt > 0.0) || cfg.r_mnt >= M_PI)
    throw ConfigError("mountain radius must lie in (0, pi)");
  if (cfg.layers_replication < 1)
    throw ConfigError("layers replication must be >= 1");

  State state(mesh.n_cells, mesh.n_edges);
  CellField b(mesh.n_cells);
  VertexField f(mesh.n_vertices);

  const double balance =
      cfg.radius * cfg.omega * cfg.u0 + 0.5 * cfg.u0 * cfg.u0;
  for (int i = 0; i < mesh.n_cells; ++i) {
    const Vec3& x = mesh.cell_xyz[i];
    const double lon = longitude_of(x);
    const double lat = latitude_of(x);
    const double dlon = wrap_angle(lon - cfg.lambda_c);
    const double dlat = lat - cfg.theta_c;
    const double r =
        std::sqrt(std::min(cfg.r_mnt * cfg.r_mnt, dlon * dlon + dlat * dlat));
    b[i] = cfg.hs0 * (1.0 - r / cfg.r_mnt);
    const double s = std::sin(lat);
    const double surface = cfg.h0 - balance * s * s / cfg.gravity;
    state.h[i] = surface - b[i];
    if (!(state.h[i] > 0.0))
      throw ConfigError("mountain leaves non-positive depth at cell " +
                        std::to_string(i));
  }
  for (int e = 0; e < mesh.n_edges; ++e) {
    const Vec3& x = mesh.edge_xyz[e];
    const Vec3 zonal{-cfg.u0 * x.y, cfg.u0 * x.x, 0.0};  // u0 * (z_hat × x)
    state.u[e] = dot(zonal, mesh.edge_normal(e));
  }
  for (int v = 0; v < mesh.n_vertices; ++v)
    f[v] = 2.0 * cfg.omega * mesh.vertex_xyz[v].z;

  return Tc5Init{std::move(state), std::move(b), std::move(f)};
}

ErrorReport l2_error(const VoronoiMesh& mesh, const State& a, const State& ref,
                     bool weighted) {
  const auto nc = static_cast<std::size_t>(mesh.n_cells);
  const auto ne = static_cast<std::size_t>(mesh.n_edges);
  if (a.h.size() != nc || ref.h.size() != nc || a.u.size() != ne ||
      ref.u.size() != ne)
    throw UsageError("error norm: states do not match the mesh");
  ErrorReport rep;
  double sum_h = 0.0, sum_u = 0.0;
  for (int i = 0; i < mesh.n_cells; ++i) {
    const double d = a.h[i] - ref.h[i];
    sum_h += weighted ? mesh.cell_area[i] * d * d : d * d;
    rep.linf_h = std::max(rep.linf_h, std::abs(d));
  }
  for (int e = 0; e < mesh.n_edges; ++e) {
    const double d = a.u[e] - ref.u[e];
    sum_u += weighted ? mesh.edge_len[e] * mesh.edge_dual_len[e] * d * d
                      : d * d;
    rep.linf_u = std::max(rep.linf_u, std::abs(d));
  }
  rep.l2_h = std::sqrt(sum_h);
  rep.l2_u = std::sqrt(sum_u);
  return rep;
}

double total_mass(const VoronoiMesh& mesh, const CellField& h) {
  if (h.size() != static_cast<std::size_t>(mesh.n_cells))
    throw UsageError("total mass: field does not match the mesh");
  double m = 0.0;
  for (int i = 0; i < mesh.n_cells; ++i) m += mesh.cell_area[i] * h[i];
  return m;
}

double total_energy(const VoronoiMesh& mesh, const State& state,
                    const CellField& b, double gravity) {
  double e_total = 0.0;
  for (int i = 0; i < mesh.n_cells; ++i) {
    double k = 0.0;
    const int n = mesh.ring_size(i);
    auto edges = mesh.ring_edges(i);
    for (int j = 0; j < n; ++j) {
      const int e = edges[j];
      k += mesh.edge_len[e] * mesh.edge_dual_len[e] * state.u[e] * state.u[e];
    }
    k /= 4.0 * mesh.cell_area[i];
    const double h = state.h[i];
    e_total += mesh.cell_area[i] * (h * k + 0.5 * gravity * h * (h + 2.0 * b[i]));
  }
  return e_total;
}

SimulationResult run_simulation(const VoronoiMesh& mesh, const RegionMap* map,
                                const PartitionPlan* plan,
                                const SchemeConfig& scheme_cfg,
                                const TestCaseConfig& tc, double duration) {
  if (plan && !map)
    throw UsageError("a partition plan requires a region map");
  if (scheme_is_lts(scheme_cfg.scheme) && !map)
    throw ConfigError("local time stepping requires a region map");
  if (!(scheme_cfg.dt > 0.0)) throw ConfigError("time step must be positive");
  if (duration < 0.0) throw ConfigError("duration must be non-negative");

  const double steps_real = duration / scheme_cfg.dt;
  const long long n_steps = std::llround(steps_real);
  if (std::abs(steps_real - static_cast<double>(n_steps)) > 1e-6)
    throw ConfigError("duration must be a whole number of steps");

  const auto t0 = std::chrono::steady_clock::now();
  // Effective kernel replication: both knobs default to 1; the test-case
  // value is the user-facing one.
  const int L = std::max(scheme_cfg.replication, tc.layers_replication);

  Tc5Init init = init_tc5(mesh, tc);
  SchemeConfig cfg = scheme_cfg;
  cfg.gravity = tc.gravity;
  cfg.replication = L;

  std::unique_ptr<TendencyEvaluator> evaluator;
  if (plan) {
    evaluator = std::make_unique<ThreadedEvaluator>(mesh, *map, *plan, init.b,
                                                    init.f, cfg.gravity, L);
  } else {
    evaluator = std::make_unique<SerialEvaluator>(mesh, map, init.b, init.f,
                                                  cfg.gravity, L);
  }

  SimulationResult result{std::move(init.state), {}, {}};
  Stepper stepper(mesh, map, *evaluator, &result.ledger, L);
  result.ledger.wall_init_seconds = seconds_since(t0);

  std::string& csv = result.diagnostics_csv;
  csv = "time,total_mass,total_energy,courant_fine,courant_coarse\n";
  double wall_io = 0.0;
  auto emit_row = [&]() {
    const auto io0 = std::chrono::steady_clock::now();
    const CourantNumbers cn = courant_numbers(mesh, map, result.state.u,
                                              cfg.dt, cfg.substeps);
    append_csv_value(csv, result.state.time, false);
    append_csv_value(csv, total_mass(mesh, result.state.h), false);
    append_csv_value(csv, total_energy(mesh, result.state, init.b, cfg.gravity),
                     false);
    append_csv_value(csv, cn.fine, false);
    append_csv_value(csv, cn.coarse, true);
    wall_io += seconds_since(io0);
  };

  emit_row();
  const auto ti = std::chrono::steady_clock::now();
  for (long long s = 0; s < n_steps; ++s) {
    try {
      stepper.step(result.state, cfg);
    } catch (const DryVertexError& err) {
      throw DryVertexError(std::string(err.what()) + " (during step " +
                               std::to_string(s + 1) + " of " +
                               std::to_string(n_steps) + ")",
                           err.vertex);
    }
    emit_row();
  }
  result.ledger.wall_integration_seconds = seconds_since(ti) - wall_io;
  result.ledger.wall_io_seconds = wall_io;
  return result;
}

double optimal_ratio(long long n_total, long long n_coarse_dt_cells,
                     long long n_fine_dt_cells, int M) {
  if (M < 1) throw UsageError("optimal ratio: M must be >= 1");
  if (n_coarse_dt_cells < 0 || n_fine_dt_cells < 0)
    throw UsageError("optimal ratio: negative cell count");
  if (n_total != n_coarse_dt_cells + n_fine_dt_cells)
    throw UsageError(
        "optimal ratio: total must equal coarse-dt plus fine-dt cells");
  if (n_total == 0) throw UsageError("optimal ratio: empty mesh");
  const double num = static_cast<double>(M) * static_cast<double>(n_total);
  const double den = static_cast<double>(n_coarse_dt_cells) +
                     static_cast<double>(M) * static_cast<double>(n_fine_dt_cells);
  return num / den;
}

double gain_percent(double t_reference, double t_lts) {
  if (!(t_reference > 0.0))
    throw UsageError("gain: reference time must be positive");
  return (t_reference - t_lts) * 100.0 / t_reference;
}

double ledger_work_ratio(const WorkLedger& a, const WorkLedger& b) {
  const double wb = static_cast<double>(b.total_evals());
  if (wb <= 0.0) throw UsageError("work ratio: empty denominator ledger");
  return static_cast<double>(a.total_evals()) / wb;
}

MeshMetrics mesh_metrics(const VoronoiMesh& mesh, const RegionMap* map) {
  MeshMetrics m;
  double lo = mesh.cell_area.empty() ? 1.0 : mesh.cell_area[0];
  double hi = lo;
  for (double a : mesh.cell_area) {
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  m.area_ratio = (lo > 0.0) ? hi / lo : 1.0;
  if (map) {
    const double n_fine = static_cast<double>(map->n_fine());
    const double n_coarse_dt =
        static_cast<double>(map->n_if1() + map->n_if2() + map->n_coarse());
    m.coarse_fine_ratio = (n_fine > 0.0) ? n_coarse_dt / n_fine : 0.0;
  }
  return m;
}

ConvergenceResult convergence_study(const VoronoiMesh& mesh,
                                    const RegionMap* map, Scheme scheme,
                                    int substeps,
                                    const std::vector<double>& dts,
                                    double duration,
                                    const TestCaseConfig& tc) {
  if (dts.empty()) throw UsageError("convergence study: empty dt list");
  for (double dt : dts)
    if (!(dt > 0.0)) throw UsageError("convergence study: dt must be positive");
  if (!(duration > 0.0))
    throw UsageError("convergence study: duration must be positive");

  const double dt_min = *std::min_element(dts.begin(), dts.end());

  SchemeConfig ref_cfg;
  ref_cfg.scheme = Scheme::RK4;
  ref_cfg.dt = dt_min / 20.0;
  const SimulationResult ref =
      run_simulation(mesh, map, nullptr, ref_cfg, tc, duration);

  ConvergenceResult out;
  out.dts = dts;
  for (double dt : dts) {
    SchemeConfig cfg;
    cfg.scheme = scheme;
    cfg.dt = dt;
    cfg.substeps = substeps;
    const SimulationResult run =
        run_simulation(mesh, map, nullptr, cfg, tc, duration);
    const ErrorReport rep = l2_error(mesh, run.state, ref.state, false);
    out.err_h.push_back(rep.l2_h);
    out.err_u.push_back(rep.l2_u);
  }

  // Least-squares slope of log(err) against log(dt).
  auto fit = [&](const std::vector<double>& errs) {
    const std::size_t n = errs.size();
    double sx = 0, sy = 0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = std::log(dts[i]);
      ys[i] = std::log(std::max(errs[i], 1e-300));
      sx += xs[i];
      sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    return (den > 0.0) ? num / den : 0.0;
  };
  out.slope_h = fit(out.err_h);
  out.slope_u = fit(out.err_u);

  // Monotonicity check: larger dt should not give smaller error.
  std::vector<std::size_t> idx(dts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return dts[a] > dts[b]; });
  for (std::size_t j = 1; j < idx.size(); ++j) {
    if (out.err_h[idx[j]] > out.err_h[idx[j - 1]]) out.monotone_h = false;
    if (out.err_u[idx[j]] > out.err_u[idx[j - 1]]) out.monotone_u = false;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw Error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  char line[1024];
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };
  while (std::fgets(line, sizeof(line), f)) {
    ++lineno;
    std::string s(line);
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fclose(f);
      throw ParseError("config: expected key = value", lineno);
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) {
      std::fclose(f);
      throw ParseError("config: empty key", lineno);
    }
    out[key] = value;
  }
  std::fclose(f);
  return out;
}

std::string fields_to_csv(const State& state) {
  std::string out = "kind,id,value\n";
  char buf[64];
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "h,%zu,%.17g\n", i, state.h[i]);
    out += buf;
  }
  for (std::size_t e = 0; e < state.u.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "u,%zu,%.17g\n", e, state.u[e]);
    out += buf;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> read_fields_csv(
    const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw Error("cannot open fields file '" + path + "'");
  std::vector<double> h, u;
  char line[256];
  int lineno = 0;
  bool saw_header = false;
  while (std::fgets(line, sizeof(line), f)) {
    ++lineno;
    if (line[0] == '#') continue;
    if (!saw_header) {
      if (std::strncmp(line, "kind,id,value", 13) != 0) {
        std::fclose(f);
        throw ParseError("fields file: unexpected header", lineno);
      }
      saw_header = true;
      continue;
    }
    char kind = 0;
    std::size_t id = 0;
    double value = 0.0;
    if (std::sscanf(line, "%c,%zu,%lf", &kind, &id, &value) != 3) {
      std::fclose(f);
      throw ParseError("fields file: expected kind,id,value", lineno);
    }
    std::vector<double>* target = nullptr;
    if (kind == 'h') target = &h;
    else if (kind == 'u') target = &u;
    else {
      std::fclose(f);
      throw ParseError("fields file: unknown field kind", lineno);
    }
    if (id != target->size()) {
      std::fclose(f);
      throw ParseError("fields file: ids must be dense and in order", lineno);
    }
    target->push_back(value);
  }
  std::fclose(f);
  return {std::move(h), std::move(u)};
}

}  // namespace mswm

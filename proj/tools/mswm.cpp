// mswm: mesh generation, region labeling, partitioning, simulation runs,
// convergence studies and report arithmetic for the multirate shallow-water
// model. Exit codes: 0 success, 1 runtime/validation failure, 2 bad usage.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mswm/errors.hpp"
#include "mswm/harness.hpp"
#include "mswm/integrators.hpp"
#include "mswm/ledger.hpp"
#include "mswm/mesh.hpp"
#include "mswm/partition.hpp"
#include "mswm/rank_pool.hpp"
#include "mswm/regions.hpp"

namespace {

using namespace mswm;

// Every file artifact starts with a comment line echoing the effective
// configuration, so a rerun with the same flags is reproducible and
// bit-identical.
std::string config_header(const std::map<std::string, std::string>& kv) {
  std::string s = "# mswm";
  for (const auto& [k, v] : kv) s += " " + k + "=" + v;
  s += "\n";
  return s;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void prepend_header(const std::string& path, const std::string& header) {
  write_text(path, header + read_text(path));
}

std::string fmt(double v, const char* format = "%.17g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string fmt3(double v) { return fmt(v, "%.3f"); }

// Accepts either a run output directory or a direct file path.
std::string artifact_path(const std::string& dir_or_file, const char* name) {
  namespace fs = std::filesystem;
  if (fs::is_directory(dir_or_file)) return dir_or_file + "/" + name;
  return dir_or_file;
}

long long ledger_total_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("total,all,,", 0) == 0)
      return std::stoll(line.substr(std::string("total,all,,").size()));
  }
  throw ParseError("no 'total,all' row in " + path, 0);
}

struct LonLat {
  double lon = 0.0, lat = 0.0;
};

// ------------------------------------------------------------------ mesh --

struct MeshArgs {
  int level = 2;
  int lloyd = 10;
  int refine_factor = 1;
  std::vector<double> refine_center{4.71238898038468986, 0.52359877559829887};
  double refine_radius = 0.6;
  double radius = 6371220.0;
  std::string out;
};

int cmd_mesh(const MeshArgs& a) {
  std::map<std::string, std::string> cfg{
      {"cmd", "mesh"},
      {"level", std::to_string(a.level)},
      {"lloyd", std::to_string(a.lloyd)},
      {"refine_factor", std::to_string(a.refine_factor)},
      {"refine_center", fmt(a.refine_center[0]) + "," + fmt(a.refine_center[1])},
      {"refine_radius", fmt(a.refine_radius)},
      {"radius", fmt(a.radius)},
      {"out", a.out}};

  VoronoiMesh mesh;
  if (a.refine_factor > 1) {
    const Vec3 center = from_lonlat(a.refine_center[0], a.refine_center[1]);
    mesh = generate_refined_mesh(a.level, center, a.refine_radius,
                                 a.refine_factor, a.lloyd, a.radius);
  } else {
    mesh = generate_icosphere_mesh(a.level, a.lloyd, a.radius);
  }
  write_mesh(mesh, a.out);
  prepend_header(a.out, config_header(cfg));

  const MeshMetrics m = mesh_metrics(mesh, nullptr);
  std::printf("%s", config_header(cfg).c_str());
  std::printf("cells %d edges %d vertices %d\n", mesh.n_cells, mesh.n_edges,
              mesh.n_vertices);
  std::printf("A_ls %.6g\n", m.area_ratio);
  return 0;
}

// --------------------------------------------------------------- regions --

struct RegionsArgs {
  std::string mesh;
  std::vector<double> cap_center{4.71238898038468986, 0.52359877559829887};
  double cap_radius = 0.5;
  int width = 1;
  std::string out;
};

int cmd_regions(const RegionsArgs& a) {
  std::map<std::string, std::string> cfg{
      {"cmd", "regions"},
      {"mesh", a.mesh},
      {"cap_center", fmt(a.cap_center[0]) + "," + fmt(a.cap_center[1])},
      {"cap_radius", fmt(a.cap_radius)},
      {"width", std::to_string(a.width)},
      {"out", a.out}};

  const VoronoiMesh mesh = read_mesh(a.mesh);
  const Vec3 center = from_lonlat(a.cap_center[0], a.cap_center[1]);
  std::vector<std::string> warnings;
  const RegionMap map = make_regions(
      mesh,
      [&](int i) { return arc_angle(mesh.cell_xyz[i], center) < a.cap_radius; },
      a.width, &warnings);
  write_regions(map, a.out);
  prepend_header(a.out, config_header(cfg));

  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const MeshMetrics m = mesh_metrics(mesh, &map);
  std::printf("%s", config_header(cfg).c_str());
  std::printf("fine %d (plain %zu uf1 %zu uf2 %zu) interface1 %d interface2 %d coarse %d\n",
              map.n_fine(), map.cells_fine_plain.size(), map.cells_uf1.size(),
              map.cells_uf2.size(), map.n_if1(), map.n_if2(), map.n_coarse());
  std::printf("C_cf %.3f\n", m.coarse_fine_ratio);
  return 0;
}

// ------------------------------------------------------------- partition --

struct PartitionArgs {
  std::string mesh;
  std::string regions;
  int ranks = 1;
  std::string case_id = "A";
  std::string import_part;
  unsigned seed = 12345;
  std::string out;
};

int cmd_partition(const PartitionArgs& a) {
  std::map<std::string, std::string> cfg{
      {"cmd", "partition"}, {"mesh", a.mesh},     {"regions", a.regions},
      {"ranks", std::to_string(a.ranks)},         {"case", a.case_id},
      {"seed", std::to_string(a.seed)},           {"out", a.out}};
  if (!a.import_part.empty()) cfg["import_part"] = a.import_part;

  const VoronoiMesh mesh = read_mesh(a.mesh);
  const RegionMap map = read_regions(mesh, a.regions);
  std::filesystem::create_directories(a.out);
  const std::string header = config_header(cfg);

  // Case B ignores the region classes when balancing (single-constraint
  // baseline); cases A and C balance each class separately.
  const RegionMap* graph_map = (a.case_id == "B") ? nullptr : &map;
  const std::string graph_path = a.out + "/graph.info";
  write_graph(mesh, graph_map, graph_path);
  prepend_header(graph_path, "%" + header.substr(1));  // METIS-style comment

  std::vector<int> labels;
  std::vector<std::string> warnings;
  if (!a.import_part.empty()) {
    labels = read_partition_file(a.import_part, a.ranks, mesh.n_cells);
  } else {
    const CellGraph graph = build_cell_graph(mesh, graph_map);
    labels = partition_multiconstraint(graph, a.ranks, a.seed, &warnings);
  }

  PartitionPlan plan = make_block_plan(mesh, map, labels, a.ranks);
  if (a.case_id == "C") plan = concentrate_interface(mesh, map, plan);

  const std::string part_path =
      a.out + "/graph.info.part." + std::to_string(a.ranks);
  write_partition_file(plan.rank_of_cell, part_path);
  prepend_header(part_path, header);
  write_text(a.out + "/plan.csv", header + plan_to_csv(plan));

  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& w : plan.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  const ImbalanceReport rep = imbalance_metrics(plan, map);
  std::printf("%s", header.c_str());
  std::printf("blocks %d\n", plan.n_blocks);
  std::printf("imbalance fine %.3f coarse %.3f interface %.3f total %.3f\n",
              rep.fine_ratio, rep.coarse_ratio, rep.interface_ratio,
              rep.total_ratio);
  std::printf("assessment: %s\n", rep.idle_risk.c_str());
  return 0;
}

// ------------------------------------------------------------------- run --

struct RunArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

// Defaults, overridden by the config file, overridden by flags.
std::map<std::string, std::string> effective_run_config(const RunArgs& a) {
  std::map<std::string, std::string> cfg{
      {"scheme", "ssprk3"}, {"M", "1"},
      {"dt_coarse", "100"}, {"duration", "1000"},
      {"n_ranks", "1"},     {"layers_replication", "1"},
      {"interface_width", "1"}, {"seed", "12345"},
      {"output_dir", "out"}};
  if (!a.config_path.empty())
    for (const auto& [k, v] : read_config_file(a.config_path)) cfg[k] = v;
  for (const auto& [k, v] : a.overrides) cfg[k] = v;
  return cfg;
}

double to_double(const std::map<std::string, std::string>& cfg,
                 const std::string& key) {
  try {
    return std::stod(cfg.at(key));
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' is not a number");
  }
}

int to_int(const std::map<std::string, std::string>& cfg,
           const std::string& key) {
  try {
    return std::stoi(cfg.at(key));
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' is not an integer");
  }
}

Scheme scheme_from_config(const std::map<std::string, std::string>& cfg) {
  std::string s = cfg.at("scheme");
  // "scheme = lts" + "order = 3" is accepted as a synonym for "lts3".
  if ((s == "lts" || s == "ssprk") && cfg.count("order"))
    s += cfg.at("order");
  return parse_scheme(s);
}

// Loads the mesh and builds the region map and partition plan the config
// asks for. The map is optional (single-rate schemes run without one).
struct LoadedCase {
  VoronoiMesh mesh;
  RegionMap map;
  bool has_map = false;
  PartitionPlan plan;
  bool has_plan = false;
};

LoadedCase load_case(const std::map<std::string, std::string>& cfg) {
  LoadedCase lc;
  if (!cfg.count("mesh_path"))
    throw UsageError("mesh_path is required (flag --mesh or config key)");
  lc.mesh = read_mesh(cfg.at("mesh_path"));

  if (cfg.count("region_file")) {
    lc.map = read_regions(lc.mesh, cfg.at("region_file"));
    lc.has_map = true;
  } else if (cfg.count("cap_radius")) {
    const double lon = cfg.count("cap_center_lon")
                           ? to_double(cfg, "cap_center_lon")
                           : 4.71238898038468986;
    const double lat = cfg.count("cap_center_lat")
                           ? to_double(cfg, "cap_center_lat")
                           : 0.52359877559829887;
    const double rad = to_double(cfg, "cap_radius");
    const Vec3 center = from_lonlat(lon, lat);
    lc.map = make_regions(
        lc.mesh,
        [&](int i) { return arc_angle(lc.mesh.cell_xyz[i], center) < rad; },
        to_int(cfg, "interface_width"));
    lc.has_map = true;
  }

  const int n_ranks = to_int(cfg, "n_ranks");
  if (n_ranks < 1) throw UsageError("n_ranks must be >= 1");
  if (n_ranks > 1 && !lc.has_map)
    throw UsageError("n_ranks > 1 requires a region map");
  if (lc.has_map) {
    const CellGraph graph = build_cell_graph(lc.mesh, &lc.map);
    const std::vector<int> labels = partition_multiconstraint(
        graph, n_ranks, static_cast<unsigned>(to_int(cfg, "seed")), nullptr);
    lc.plan = make_block_plan(lc.mesh, lc.map, labels, n_ranks);
    lc.has_plan = true;
  }
  return lc;
}

int cmd_run(const RunArgs& a) {
  std::map<std::string, std::string> cfg = effective_run_config(a);
  cfg["cmd"] = "run";
  const std::string header = config_header(cfg);
  std::printf("%s", header.c_str());

  const LoadedCase lc = load_case(cfg);

  SchemeConfig sc;
  sc.scheme = scheme_from_config(cfg);
  sc.dt = to_double(cfg, "dt_coarse");
  sc.substeps = to_int(cfg, "M");
  TestCaseConfig tc;
  tc.layers_replication = to_int(cfg, "layers_replication");
  const double duration = to_double(cfg, "duration");

  const RegionMap* map = lc.has_map ? &lc.map : nullptr;
  const PartitionPlan* plan = lc.has_plan ? &lc.plan : nullptr;
  const SimulationResult result =
      run_simulation(lc.mesh, map, plan, sc, tc, duration);

  const std::string dir = cfg.at("output_dir");
  std::filesystem::create_directories(dir);
  write_text(dir + "/diagnostics.csv", header + result.diagnostics_csv);
  write_text(dir + "/fields_final.csv", header + fields_to_csv(result.state));
  write_text(dir + "/ledger.csv", header + ledger_to_csv(result.ledger));

  Tc5Init init = init_tc5(lc.mesh, tc);
  const double mass0 = total_mass(lc.mesh, init.state.h);
  const double mass1 = total_mass(lc.mesh, result.state.h);
  std::string report = header;
  report += "scheme " + std::string(scheme_name(sc.scheme)) + "\n";
  report += "steps " + std::to_string(result.ledger.steps_taken) + "\n";
  report += "final_time " + fmt(result.state.time) + "\n";
  report += "total_mass_initial " + fmt(mass0) + "\n";
  report += "total_mass_final " + fmt(mass1) + "\n";
  report += "mass_rel_drift " + fmt((mass1 - mass0) / mass0, "%.3e") + "\n";
  report += "total_energy_final " +
            fmt(total_energy(lc.mesh, result.state, init.b, tc.gravity)) + "\n";
  report += "ledger_total_evals " +
            std::to_string(result.ledger.total_evals()) + "\n";
  report += "wall_init_seconds " +
            fmt(result.ledger.wall_init_seconds, "%.3f") + "\n";
  report += "wall_integration_seconds " +
            fmt(result.ledger.wall_integration_seconds, "%.3f") + "\n";
  write_text(dir + "/report.txt", report);

  std::printf("steps %lld final_time %s\n",
              static_cast<long long>(result.ledger.steps_taken),
              fmt(result.state.time, "%.10g").c_str());
  std::printf("mass_rel_drift %s\n",
              fmt((mass1 - mass0) / mass0, "%.3e").c_str());
  std::printf("ledger_total_evals %lld\n",
              static_cast<long long>(result.ledger.total_evals()));
  std::printf("outputs in %s\n", dir.c_str());
  return 0;
}

// -------------------------------------------------------------- converge --

int cmd_converge(const RunArgs& a, const std::vector<double>& dts,
                 const std::string& out_path) {
  std::map<std::string, std::string> cfg = effective_run_config(a);
  cfg["cmd"] = "converge";
  std::string dts_s;
  for (double dt : dts) dts_s += (dts_s.empty() ? "" : ",") + fmt(dt, "%g");
  cfg["dts"] = dts_s;
  const std::string header = config_header(cfg);
  std::printf("%s", header.c_str());

  const LoadedCase lc = load_case(cfg);
  TestCaseConfig tc;
  tc.layers_replication = to_int(cfg, "layers_replication");

  const ConvergenceResult res = convergence_study(
      lc.mesh, lc.has_map ? &lc.map : nullptr, scheme_from_config(cfg),
      to_int(cfg, "M"), dts, to_double(cfg, "duration"), tc);

  std::string table = "dt,err_h,err_u\n";
  for (std::size_t i = 0; i < res.dts.size(); ++i)
    table += fmt(res.dts[i], "%g") + "," + fmt(res.err_h[i], "%.6e") + "," +
             fmt(res.err_u[i], "%.6e") + "\n";
  std::printf("%s", table.c_str());
  std::printf("slope_h %.3f slope_u %.3f\n", res.slope_h, res.slope_u);
  if (!res.monotone_h || !res.monotone_u)
    std::printf("note: error sequence not monotone in dt (h %s, u %s)\n",
                res.monotone_h ? "yes" : "no", res.monotone_u ? "yes" : "no");
  if (!out_path.empty()) {
    std::string out = header + table;
    out += "# slope_h " + fmt3(res.slope_h) + " slope_u " + fmt3(res.slope_u) +
           "\n";
    write_text(out_path, out);
  }
  return 0;
}

// ---------------------------------------------------------------- report --

int cmd_report(const std::vector<long long>& optimal,
               const std::vector<double>& gain,
               const std::vector<std::string>& compare,
               const std::vector<std::string>& work_ratio,
               const std::string& mesh_path, const std::string& regions_path) {
  bool did_something = false;
  if (!optimal.empty()) {
    if (optimal[3] > INT32_MAX || optimal[3] < 1)
      throw UsageError("optimal ratio: M out of range");
    std::printf("optimal_ratio %.3f\n",
                optimal_ratio(optimal[0], optimal[1], optimal[2],
                              static_cast<int>(optimal[3])));
    did_something = true;
  }
  if (!gain.empty()) {
    std::printf("gain_percent %.3f\n", gain_percent(gain[0], gain[1]));
    did_something = true;
  }
  if (!compare.empty()) {
    const auto [h_a, u_a] =
        read_fields_csv(artifact_path(compare[0], "fields_final.csv"));
    const auto [h_b, u_b] =
        read_fields_csv(artifact_path(compare[1], "fields_final.csv"));
    if (h_a.size() != h_b.size() || u_a.size() != u_b.size())
      throw UsageError("compare: field sizes differ");
    double l2h = 0, l2u = 0, rel = 0;
    for (std::size_t i = 0; i < h_a.size(); ++i) {
      const double d = h_a[i] - h_b[i];
      l2h += d * d;
      rel = std::max(rel, std::abs(d) / std::max(std::abs(h_b[i]), 1e-300));
    }
    for (std::size_t e = 0; e < u_a.size(); ++e) {
      const double d = u_a[e] - u_b[e];
      l2u += d * d;
      const double scale = std::max(std::abs(u_b[e]), 1.0);
      rel = std::max(rel, std::abs(d) / scale);
    }
    std::printf("l2_diff_h %.6e\n", std::sqrt(l2h));
    std::printf("l2_diff_u %.6e\n", std::sqrt(l2u));
    std::printf("max_rel_diff %.6e\n", rel);
    did_something = true;
  }
  if (!work_ratio.empty()) {
    const long long wa =
        ledger_total_from_csv(artifact_path(work_ratio[0], "ledger.csv"));
    const long long wb =
        ledger_total_from_csv(artifact_path(work_ratio[1], "ledger.csv"));
    if (wb <= 0) throw UsageError("work ratio: empty denominator ledger");
    std::printf("work_ratio %.3f\n",
                static_cast<double>(wa) / static_cast<double>(wb));
    did_something = true;
  }
  if (!mesh_path.empty()) {
    const VoronoiMesh mesh = read_mesh(mesh_path);
    RegionMap map;
    const RegionMap* mp = nullptr;
    if (!regions_path.empty()) {
      map = read_regions(mesh, regions_path);
      mp = &map;
    }
    const MeshMetrics m = mesh_metrics(mesh, mp);
    std::printf("A_ls %.6g\n", m.area_ratio);
    if (mp) std::printf("C_cf %.3f\n", m.coarse_fine_ratio);
    did_something = true;
  }
  if (!did_something)
    throw UsageError(
        "report: nothing to do (use --optimal-ratio, --gain, --compare, "
        "--work-ratio or --mesh-metrics)");
  return 0;
}

// Register an override flag: when the user passes it, the value lands in
// args.overrides under the run-config key.
void add_override(CLI::App* cmd, RunArgs& args, const std::string& flag,
                  const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
         flag,
         [&args, key](const std::string& v) { args.overrides[key] = v; }, help)
      ->type_name("TEXT");
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value config file");
  add_override(cmd, args, "--mesh", "mesh_path", "MSWM1 mesh file");
  add_override(cmd, args, "--regions", "region_file", "region label file");
  add_override(cmd, args, "--cap-lon", "cap_center_lon",
               "fine-cap center longitude (radians)");
  add_override(cmd, args, "--cap-lat", "cap_center_lat",
               "fine-cap center latitude (radians)");
  add_override(cmd, args, "--cap-radius", "cap_radius",
               "fine-cap angular radius (radians)");
  add_override(cmd, args, "--width", "interface_width", "interface layers");
  add_override(cmd, args, "--scheme", "scheme",
               "ssprk2 | ssprk3 | rk4 | lts2 | lts3");
  add_override(cmd, args, "--order", "order", "scheme order when scheme=lts");
  add_override(cmd, args, "--M", "M", "substeps per coarse step");
  add_override(cmd, args, "--dt", "dt_coarse", "coarse time step (s)");
  add_override(cmd, args, "--duration", "duration", "simulated time (s)");
  add_override(cmd, args, "--ranks", "n_ranks", "emulated ranks");
  add_override(cmd, args, "--layers", "layers_replication",
               "kernel cost replication");
  add_override(cmd, args, "--out", "output_dir", "output directory");
  add_override(cmd, args, "--seed", "seed", "partitioner seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multirate shallow-water model on spherical Voronoi meshes"};
  app.require_subcommand(1);

  MeshArgs mesh_args;
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh file");
  mesh_cmd->add_option("--level", mesh_args.level,
                       "icosahedron subdivision level")
      ->check(CLI::Range(0, 7));
  mesh_cmd->add_option("--lloyd", mesh_args.lloyd, "Lloyd relaxation passes")
      ->check(CLI::Range(0, 200));
  mesh_cmd->add_option("--refine-factor", mesh_args.refine_factor,
                       "local refinement factor (1 = uniform)")
      ->check(CLI::Range(1, 8));
  mesh_cmd->add_option("--refine-center", mesh_args.refine_center,
                       "refinement center lon,lat (radians)")
      ->expected(2)
      ->delimiter(',');
  mesh_cmd->add_option("--refine-radius", mesh_args.refine_radius,
                       "refinement cap radius (radians)");
  mesh_cmd->add_option("--radius", mesh_args.radius, "sphere radius (m)");
  mesh_cmd->add_option("--out", mesh_args.out, "output mesh path")->required();

  RegionsArgs region_args;
  auto* regions_cmd = app.add_subcommand("regions", "label LTS regions");
  regions_cmd->add_option("--mesh", region_args.mesh, "MSWM1 mesh file")
      ->required();
  regions_cmd
      ->add_option("--cap-center", region_args.cap_center,
                   "fine-cap center lon,lat (radians)")
      ->expected(2)
      ->delimiter(',');
  regions_cmd
      ->add_option("--cap-radius", region_args.cap_radius,
                   "fine-cap angular radius (radians)")
      ->required();
  regions_cmd->add_option("--width", region_args.width,
                          "interface width in layers");
  regions_cmd->add_option("--out", region_args.out, "output region file")
      ->required();

  PartitionArgs part_args;
  auto* part_cmd = app.add_subcommand("partition", "partition for N ranks");
  part_cmd->add_option("--mesh", part_args.mesh, "MSWM1 mesh file")->required();
  part_cmd->add_option("--regions", part_args.regions, "region label file")
      ->required();
  part_cmd->add_option("--ranks", part_args.ranks, "number of ranks")
      ->check(CLI::PositiveNumber);
  part_cmd
      ->add_option("--case", part_args.case_id,
                   "A: region-aware, B: single-constraint, C: interface on rank 0")
      ->check(CLI::IsMember({"A", "B", "C"}));
  part_cmd->add_option("--import-part", part_args.import_part,
                       "use an existing rank-label file");
  part_cmd->add_option("--seed", part_args.seed, "partitioner seed");
  part_cmd->add_option("--out", part_args.out, "output directory")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run the mountain test case");
  add_run_options(run_cmd, run_args);

  RunArgs conv_args;
  std::vector<double> conv_dts;
  std::string conv_out;
  auto* conv_cmd =
      app.add_subcommand("converge", "time-step convergence study");
  add_run_options(conv_cmd, conv_args);
  conv_cmd->add_option("--dts", conv_dts, "coarse dt ladder, e.g. 40,20,10,5")
      ->required()
      ->delimiter(',');
  conv_cmd->add_option("--table-out", conv_out, "write dt/error table here");

  std::vector<long long> rep_optimal;
  std::vector<double> rep_gain;
  std::vector<std::string> rep_compare, rep_work;
  std::string rep_mesh, rep_regions;
  auto* rep_cmd = app.add_subcommand("report", "derived metrics");
  rep_cmd
      ->add_option("--optimal-ratio", rep_optimal,
                   "n_total n_coarse_dt n_fine_dt M")
      ->expected(4);
  rep_cmd->add_option("--gain", rep_gain, "t_reference t_lts")->expected(2);
  rep_cmd
      ->add_option("--compare", rep_compare,
                   "two run dirs (or fields_final.csv files) to diff")
      ->expected(2);
  rep_cmd
      ->add_option("--work-ratio", rep_work,
                   "two run dirs (or ledger.csv files) to ratio")
      ->expected(2);
  rep_cmd->add_option("--mesh-metrics", rep_mesh, "mesh file for A_ls");
  rep_cmd->add_option("--regions", rep_regions, "region file for C_cf");

  try {
    app.parse(argc, argv);
    if (*mesh_cmd) return cmd_mesh(mesh_args);
    if (*regions_cmd) return cmd_regions(region_args);
    if (*part_cmd) return cmd_partition(part_args);
    if (*run_cmd) return cmd_run(run_args);
    if (*conv_cmd) return cmd_converge(conv_args, conv_dts, conv_out);
    if (*rep_cmd)
      return cmd_report(rep_optimal, rep_gain, rep_compare, rep_work, rep_mesh,
                        rep_regions);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const mswm::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const mswm::ParseError& e) {
    std::fprintf(stderr, "error: %s (line %d)\n", e.what(), e.line);
    return 1;
  } catch (const mswm::DryVertexError& e) {
    std::fprintf(stderr, "error: %s (vertex %d)\n", e.what(), e.vertex);
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

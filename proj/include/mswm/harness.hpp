#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mswm/integrators.hpp"
#include "mswm/ledger.hpp"
#include "mswm/mesh.hpp"
#include "mswm/partition.hpp"
#include "mswm/regions.hpp"

namespace mswm {

// Zonal flow over an isolated mountain on the rotating sphere.  The flow and
// height constants follow the standard rotating-sphere test suite and can be
// overridden per run.
struct TestCaseConfig {
  double lambda_c = 4.71238898038468986;  // mountain center longitude, 3*pi/2
  double theta_c = 0.52359877559829887;   // mountain center latitude, pi/6
  double r_mnt = 0.34906585039886590;     // mountain radius, pi/9
  double hs0 = 2000.0;                    // mountain peak height, m
  double u0 = 20.0;                       // zonal wind speed, m/s
  double h0 = 5960.0;                     // reference fluid depth, m
  double gravity = 9.80616;               // m/s^2
  double omega = 7.292e-5;                // rotation rate, 1/s
  double radius = 6371220.0;              // sphere radius, m
  int layers_replication = 1;             // kernel cost multiplier
};

struct Tc5Init {
  State state;
  CellField b;       // bottom topography per cell
  VertexField f;     // Coriolis parameter per vertex
};

// Mountain profile, balanced height minus topography, zonal wind projected
// on edge normals, Coriolis at vertices.  ConfigError if the mountain leaves
// non-positive fluid depth anywhere.
Tc5Init init_tc5(const VoronoiMesh& mesh, const TestCaseConfig& cfg);

struct ErrorReport {
  double l2_h = 0.0;
  double l2_u = 0.0;
  double linf_h = 0.0;
  double linf_u = 0.0;
};

// Plain vector l2 (default) or area/length weighted norms of a - ref.
ErrorReport l2_error(const VoronoiMesh& mesh, const State& a, const State& ref,
                     bool weighted = false);

double total_mass(const VoronoiMesh& mesh, const CellField& h);
double total_energy(const VoronoiMesh& mesh, const State& state,
                    const CellField& b, double gravity);

struct SimulationResult {
  State state;
  std::string diagnostics_csv;  // time,total_mass,total_energy,courant...
  WorkLedger ledger;
};

// Integrates the mountain test case for `duration` (a whole number of
// steps).  With a plan, tendencies run on the emulated rank pool; otherwise
// serially.  The ledger counts every element evaluation and wall time.
SimulationResult run_simulation(const VoronoiMesh& mesh, const RegionMap* map,
                                const PartitionPlan* plan,
                                const SchemeConfig& scheme_cfg,
                                const TestCaseConfig& tc, double duration);

// M*n_total / (n_coarse_dt + M*n_fine_dt); UsageError when the counts are
// inconsistent.
double optimal_ratio(long long n_total, long long n_coarse_dt_cells,
                     long long n_fine_dt_cells, int M);

// (t_reference - t_lts) * 100 / t_reference.
double gain_percent(double t_reference, double t_lts);

// Ratio of total element evaluations between two ledgers (a/b).
double ledger_work_ratio(const WorkLedger& a, const WorkLedger& b);

struct MeshMetrics {
  double area_ratio = 1.0;       // largest / smallest cell area
  double coarse_fine_ratio = 0;  // (coarse + interface cells) / fine cells
};
MeshMetrics mesh_metrics(const VoronoiMesh& mesh, const RegionMap* map);

struct ConvergenceResult {
  std::vector<double> dts;
  std::vector<double> err_h, err_u;  // final-time l2 vs an RK4 reference
  double slope_h = 0.0, slope_u = 0.0;
  bool monotone_h = true, monotone_u = true;
};

// Runs the scheme at every dt in the ladder and fits log(err) ~ log(dt).
// The reference is RK4 at min(dts)/20.  Non-monotone error sequences are
// reported through the flags, not as errors.
ConvergenceResult convergence_study(const VoronoiMesh& mesh,
                                    const RegionMap* map, Scheme scheme,
                                    int substeps,
                                    const std::vector<double>& dts,
                                    double duration,
                                    const TestCaseConfig& tc);

// key = value file with '#' comments; ParseError carries the line number.
std::map<std::string, std::string> read_config_file(const std::string& path);

// fields_final.csv: kind,id,value rows for h then u.
std::string fields_to_csv(const State& state);
std::pair<std::vector<double>, std::vector<double>> read_fields_csv(
    const std::string& path);

}  // namespace mswm

#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mswm/fields.hpp"
#include "mswm/ledger.hpp"
#include "mswm/mesh.hpp"
#include "mswm/operators.hpp"
#include "mswm/regions.hpp"

namespace mswm {

// Prognostic state: cell thickness, edge normal velocity, model time.
struct State {
  CellField h;
  EdgeField u;
  double time = 0.0;

  State(std::size_t n_cells, std::size_t n_edges) : h(n_cells), u(n_edges) {}
};

enum class Scheme { SSPRK2, SSPRK3, RK4, LTS2, LTS3 };

Scheme parse_scheme(const std::string& name);  // ConfigError on unknown name
const char* scheme_name(Scheme s);
bool scheme_is_lts(Scheme s);
int scheme_stage_count(Scheme s);  // 2, 3, 4, 2, 3

struct SchemeConfig {
  Scheme scheme = Scheme::SSPRK3;
  double dt = 0.0;        // coarse step for LTS schemes, global step otherwise
  int substeps = 1;       // M: fine substeps per coarse step (LTS only)
  double gravity = 9.80616;
  int replication = 1;    // repeat kernel arithmetic to emulate more layers
};

// Element-group bits used to request evaluation subsets.  Groups are the
// disjoint region classes of RegionMap; unions are formed by or-ing bits.
enum GroupBit : unsigned {
  kCellsFinePlain = 1u << 0,
  kCellsUF1 = 1u << 1,
  kCellsUF2 = 1u << 2,
  kCellsIf1 = 1u << 3,
  kCellsIf2 = 1u << 4,
  kCellsCoarse = 1u << 5,
  kEdgesFinePlain = 1u << 6,
  kEdgesUFine = 1u << 7,
  kEdgesIf1 = 1u << 8,
  kEdgesIf2 = 1u << 9,
  kEdgesCoarse = 1u << 10,
};

constexpr unsigned kCellsAll = kCellsFinePlain | kCellsUF1 | kCellsUF2 |
                               kCellsIf1 | kCellsIf2 | kCellsCoarse;
constexpr unsigned kEdgesAll = kEdgesFinePlain | kEdgesUFine | kEdgesIf1 |
                               kEdgesIf2 | kEdgesCoarse;
constexpr unsigned kMaskAll = kCellsAll | kEdgesAll;

// Evaluates shallow-water tendencies on a masked subset of elements.
// Implementations must be restriction-consistent: the values written for an
// element must be bitwise identical no matter which other elements the call
// covers.  dh/du are full-size arrays; entries outside the mask are left
// untouched.
class TendencyEvaluator {
 public:
  virtual ~TendencyEvaluator() = default;
  virtual void eval(const double* h, const double* u, unsigned mask,
                    double* dh, double* du) = 0;
};

// Single-thread evaluator over the whole mesh.  Without a region map only
// kMaskAll is accepted; with one, any group union works.
class SerialEvaluator : public TendencyEvaluator {
 public:
  SerialEvaluator(const VoronoiMesh& mesh, const RegionMap* map,
                  const CellField& b, const VertexField& f_vertex,
                  double gravity, int replication = 1);
  void eval(const double* h, const double* u, unsigned mask, double* dh,
            double* du) override;

 private:
  const std::pair<std::vector<int>, std::vector<int>>& sets_for(unsigned mask);

  const VoronoiMesh& mesh_;
  const RegionMap* map_;
  const double* b_;
  const double* f_;
  double gravity_;
  int replication_;
  TendencyScratch scratch_;
  std::unordered_map<unsigned, std::pair<std::vector<int>, std::vector<int>>>
      set_cache_;
};

// Interpolation weights for interface predictions: the predicted value is
// w_old*y_old + w_first*y_first_stage + w_second*y_second_stage.
struct LtsCoeffs {
  double w_old;
  double w_first;
  double w_second;
};

// order in {2,3}; stage in 1..order; k in 0..M-1; M >= 1.  UsageError else.
LtsCoeffs lts_interp_coeffs(int order, int stage, int k, int M);

// Scratch arrays for one local-time-stepping step.  Exposed so tests can
// drive the interface correction directly.
struct LtsWorkspace {
  CellField h1, h2, ha, hb, hc, dh, acc_h1, acc_h2, acc_h3;
  EdgeField u1, u2, ua, ub, uc, du, acc_u1, acc_u2, acc_u3;
  int acc_count = 0;  // substep evaluations folded into each accumulator

  LtsWorkspace(std::size_t n_cells, std::size_t n_edges)
      : h1(n_cells), h2(n_cells), ha(n_cells), hb(n_cells), hc(n_cells),
        dh(n_cells), acc_h1(n_cells), acc_h2(n_cells), acc_h3(n_cells),
        u1(n_edges), u2(n_edges), ua(n_edges), ub(n_edges), uc(n_edges),
        du(n_edges), acc_u1(n_edges), acc_u2(n_edges), acc_u3(n_edges) {}
};

// Finalizes interface-1 and interface-2 elements from the accumulated
// substep tendencies: y_new = y_old + (dt/M) * sum_s theta_s * acc_s.
// Requires ws.acc_count == M (each accumulator holds exactly M evaluations);
// throws UsageError otherwise.
void apply_interface_correction(const RegionMap& map, int order, double dt,
                                int M, const double* h_old,
                                const double* u_old, const LtsWorkspace& ws,
                                double* h_out, double* u_out);

// Drives time steps through an evaluator, with optional work accounting.
// The region map is required for LTS schemes and for per-region ledger
// attribution; pass nullptr for uniform-mesh integrators without a map.
class Stepper {
 public:
  Stepper(const VoronoiMesh& mesh, const RegionMap* map,
          TendencyEvaluator& evaluator, WorkLedger* ledger, int replication);

  void ssprk_step(int order, State& state, double dt);
  void rk4_step(State& state, double dt);
  void lts_step(int order, State& state, double dt, int substeps);

  // One step according to cfg.scheme (dt and substeps taken from cfg).
  void step(State& state, const SchemeConfig& cfg);

 private:
  void evaluate(const double* h, const double* u, unsigned mask, int stage);
  void tally(unsigned mask, int stage);

  const VoronoiMesh& mesh_;
  const RegionMap* map_;
  TendencyEvaluator& evaluator_;
  WorkLedger* ledger_;
  int replication_;
  LtsWorkspace ws_;
  CellField h_tmp_, h_acc_;
  EdgeField u_tmp_, u_acc_;
};

// Convenience single-step entry points building a serial evaluator
// internally.  Tests use these; long runs should hold a Stepper.
State ssprk_step(int order, const VoronoiMesh& mesh, const State& state,
                 const SchemeConfig& cfg, const CellField& b,
                 const VertexField& f_vertex);
State rk4_step(const VoronoiMesh& mesh, const State& state,
               const SchemeConfig& cfg, const CellField& b,
               const VertexField& f_vertex);
State lts_step(int order, const VoronoiMesh& mesh, const RegionMap& map,
               const State& state, const SchemeConfig& cfg, const CellField& b,
               const VertexField& f_vertex);

// Largest advective Courant numbers dt*|u|/d_e over fine and non-fine edges.
// Without a map both numbers cover every edge.  The fine number uses dt/M.
struct CourantNumbers {
  double fine = 0.0;
  double coarse = 0.0;
};
CourantNumbers courant_numbers(const VoronoiMesh& mesh, const RegionMap* map,
                               const EdgeField& u, double dt, int substeps);

}  // namespace mswm

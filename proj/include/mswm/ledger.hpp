#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace mswm {

// Region buckets used for work accounting.  Underline-fine elements count as
// fine; they are a bookkeeping split of the fine region, not a separate one.
enum LedgerRegion : int {
  kLedgerFine = 0,
  kLedgerInterface1 = 1,
  kLedgerInterface2 = 2,
  kLedgerCoarse = 3,
  kLedgerRegionCount = 4,
};

constexpr int kLedgerStageCount = 4;  // RK4 has the most stages.

// Counts right-hand-side element evaluations per (region, stage) and wall
// time per phase.  Counters are exact: every kernel call adds the size of the
// element set it was asked to evaluate, scaled by the cost-replication
// factor, so the ledger can be checked against hand-derived totals.
struct WorkLedger {
  std::array<std::array<std::int64_t, kLedgerStageCount>, kLedgerRegionCount>
      cell_evals{};
  std::array<std::array<std::int64_t, kLedgerStageCount>, kLedgerRegionCount>
      edge_evals{};
  double wall_init_seconds = 0.0;
  double wall_integration_seconds = 0.0;
  double wall_io_seconds = 0.0;
  std::int64_t steps_taken = 0;

  void add_cells(int region, int stage, std::int64_t n) {
    cell_evals[region][stage] += n;
  }
  void add_edges(int region, int stage, std::int64_t n) {
    edge_evals[region][stage] += n;
  }

  std::int64_t total_cell_evals() const {
    std::int64_t t = 0;
    for (const auto& r : cell_evals)
      for (std::int64_t v : r) t += v;
    return t;
  }
  std::int64_t total_edge_evals() const {
    std::int64_t t = 0;
    for (const auto& r : edge_evals)
      for (std::int64_t v : r) t += v;
    return t;
  }
  // Combined element-evaluation count; the unit of "work" used in reports.
  std::int64_t total_evals() const {
    return total_cell_evals() + total_edge_evals();
  }

  void reset() { *this = WorkLedger{}; }
};

// region index -> human-readable name, for CSV output.
const char* ledger_region_name(int region);

// Serializes the ledger as CSV (kind,region,stage,count plus wall-time and
// step rows).
std::string ledger_to_csv(const WorkLedger& ledger);

}  // namespace mswm

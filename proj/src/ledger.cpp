#include "mswm/ledger.hpp"

#include <cinttypes>
#include <cstdio>

namespace mswm {

const char* ledger_region_name(int region) {
  switch (region) {
    case kLedgerFine:
      return "fine";
    case kLedgerInterface1:
      return "interface1";
    case kLedgerInterface2:
      return "interface2";
    case kLedgerCoarse:
      return "coarse";
    default:
      return "unknown";
  }
}

std::string ledger_to_csv(const WorkLedger& ledger) {
  std::string out = "kind,region,stage,count\n";
  char buf[160];
  for (int r = 0; r < kLedgerRegionCount; ++r) {
    for (int s = 0; s < kLedgerStageCount; ++s) {
      std::snprintf(buf, sizeof(buf), "cell,%s,%d,%" PRId64 "\n",
                    ledger_region_name(r), s + 1, ledger.cell_evals[r][s]);
      out += buf;
    }
  }
  for (int r = 0; r < kLedgerRegionCount; ++r) {
    for (int s = 0; s < kLedgerStageCount; ++s) {
      std::snprintf(buf, sizeof(buf), "edge,%s,%d,%" PRId64 "\n",
                    ledger_region_name(r), s + 1, ledger.edge_evals[r][s]);
      out += buf;
    }
  }
  std::snprintf(buf, sizeof(buf), "total,cells,,%" PRId64 "\n",
                ledger.total_cell_evals());
  out += buf;
  std::snprintf(buf, sizeof(buf), "total,edges,,%" PRId64 "\n",
                ledger.total_edge_evals());
  out += buf;
  std::snprintf(buf, sizeof(buf), "total,all,,%" PRId64 "\n",
                ledger.total_evals());
  out += buf;
  std::snprintf(buf, sizeof(buf), "steps,,,%" PRId64 "\n", ledger.steps_taken);
  out += buf;
  std::snprintf(buf, sizeof(buf), "wall_seconds,init,,%.6f\n",
                ledger.wall_init_seconds);
  out += buf;
  std::snprintf(buf, sizeof(buf), "wall_seconds,integration,,%.6f\n",
                ledger.wall_integration_seconds);
  out += buf;
  std::snprintf(buf, sizeof(buf), "wall_seconds,io,,%.6f\n",
                ledger.wall_io_seconds);
  out += buf;
  return out;
}

}  // namespace mswm

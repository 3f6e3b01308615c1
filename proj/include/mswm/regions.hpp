#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mswm/mesh.hpp"

namespace mswm {

enum class CellRegion : uint8_t { Fine = 0, Interface1 = 1, Interface2 = 2, Coarse = 3 };
enum class CellSub : uint8_t { None = 0, UnderlineF1 = 1, UnderlineF2 = 2 };
enum class EdgeRegion : uint8_t {
  FineEdge = 0,
  UnderlineFineEdge = 1,
  Interface1Edge = 2,
  Interface2Edge = 3,
  CoarseEdge = 4
};

// Disjoint cover of cells (and, once labeled, edges) into the multirate
// regions: fine cells step with dt/M, coarse cells with dt, two interface
// bands in between carry the correction that keeps the scheme conservative.
// The ascending id lists are the forms the integrators consume.
struct RegionMap {
  std::vector<CellRegion> cell_label;
  std::vector<CellSub> cell_sublabel;
  std::vector<EdgeRegion> edge_label;
  int interface_width = 1;
  bool sublabels_assigned = false;
  bool edges_assigned = false;

  // Cell groups (ascending, disjoint).
  std::vector<int> cells_fine;        // every Fine cell
  std::vector<int> cells_fine_plain;  // Fine minus the underline layers
  std::vector<int> cells_uf1, cells_uf2;
  std::vector<int> cells_if1, cells_if2, cells_coarse;
  // Edge groups (ascending, disjoint).
  std::vector<int> edges_fine, edges_ufine, edges_if1, edges_if2, edges_coarse;

  int n_fine() const { return int(cells_fine.size()); }
  int n_if1() const { return int(cells_if1.size()); }
  int n_if2() const { return int(cells_if2.size()); }
  int n_coarse() const { return int(cells_coarse.size()); }

  // Recompute the group lists from the label arrays.
  void rebuild_groups(int n_cells, int n_edges);
};

// Grow the region map from a fine-cell predicate: Interface1 is the first
// `interface_width` breadth-first layers of non-fine cells around the fine
// set, Interface2 the next ones, Coarse the rest. Ties at equal distance
// are resolved in ascending cell id. Throws ConfigError when the fine set
// is empty or the sphere has no room for the interface layers plus a
// nonempty coarse region.
RegionMap label_cells(const VoronoiMesh& mesh, const std::function<bool(int)>& fine_predicate,
                      int interface_width);

// Mark the two fine layers nearest Interface1 (UnderlineF1 touches it,
// UnderlineF2 touches UnderlineF1). Only the third-order scheme reads them.
// Returns human-readable warnings (e.g. a fine region too thin to hold both
// layers).
std::vector<std::string> label_underline_fine(const VoronoiMesh& mesh, RegionMap& map);

// Assign edge labels from cell labels, fine side winning: plain-fine, then
// underline-fine, Interface1, Interface2, Coarse.
void label_edges(const VoronoiMesh& mesh, RegionMap& map);

// Full pipeline: label_cells + label_underline_fine + label_edges.
RegionMap make_regions(const VoronoiMesh& mesh, const std::function<bool(int)>& fine_predicate,
                       int interface_width, std::vector<std::string>* warnings = nullptr);

struct RegionReport {
  int n_fine = 0, n_if1 = 0, n_if2 = 0, n_coarse = 0;
  int n_uf1 = 0, n_uf2 = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Re-derives every invariant from scratch (cover, adjacency, layer
// distances, edge precedence) and reports violations instead of throwing.
RegionReport validate_regions(const VoronoiMesh& mesh, const RegionMap& map);

// Region file: `cell_id label sublabel` per line with 1=fine, 2=coarse,
// 3=interface1, 4=interface2; sublabel 5=UnderlineF1, 7=UnderlineF2, else 0.
void write_regions(const RegionMap& map, const std::string& path);
// Loads cell labels, re-derives edge labels and the interface width.
RegionMap read_regions(const VoronoiMesh& mesh, const std::string& path);

}  // namespace mswm

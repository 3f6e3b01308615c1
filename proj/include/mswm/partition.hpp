#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mswm/mesh.hpp"
#include "mswm/regions.hpp"

namespace mswm {

// Cell adjacency graph with optional one-hot region weights per cell:
// (1,0,0) coarse, (0,1,0) fine, (0,0,1) interface.
struct CellGraph {
  std::vector<std::vector<int>> adjacency;        // sorted neighbor ids
  std::vector<std::array<int, 3>> weights;        // empty when unweighted
  bool weighted() const { return !weights.empty(); }
  std::size_t n_cells() const { return adjacency.size(); }
  std::size_t n_pairs() const;                    // undirected edge count
};

CellGraph build_cell_graph(const VoronoiMesh& mesh, const RegionMap* map);

// Graph file: header "n m" (unweighted) or "n m 010 3" (weighted); one line
// per cell with the three weights (weighted only) followed by 1-based
// neighbor ids.
void write_graph(const VoronoiMesh& mesh, const RegionMap* map,
                 const std::string& path);

// Partition file: one 0-based block label per line, expected_lines lines,
// each label in [0, n_parts).  Blank lines and '#'/'%' comment lines are
// skipped.  ParseError (with line number) otherwise.
std::vector<int> read_partition_file(const std::string& path, int n_parts,
                                     std::size_t expected_lines);
void write_partition_file(const std::vector<int>& labels,
                          const std::string& path);

// Deterministic balanced partitioner.  With weights, each part receives a
// near-equal share of every region class (greedy growth along a breadth
// first sweep, then one boundary-refinement pass that never worsens the
// per-class balance).  ConfigError if n_parts exceeds the cell count.
std::vector<int> partition_multiconstraint(const CellGraph& graph, int n_parts,
                                           std::uint64_t seed,
                                           std::vector<std::string>* warnings);

enum class BlockRegion { Fine = 0, Coarse = 1, Interface = 2 };
const char* block_region_name(BlockRegion r);

// Rank/block layout: rank k owns blocks 3k (fine), 3k+1 (coarse), 3k+2
// (interface).  Every cell and edge is owned by exactly one block; halos are
// the cells within two adjacency hops of the owned cells plus the edges
// touching the widened cell set.
struct PartitionPlan {
  int n_ranks = 0;
  int n_blocks = 0;
  std::vector<int> rank_of_cell;
  std::vector<int> block_of_cell;
  std::vector<int> block_of_edge;
  std::vector<std::vector<int>> owned_cells;   // per block, ascending
  std::vector<std::vector<int>> owned_edges;
  std::vector<std::vector<int>> halo_cells;
  std::vector<std::vector<int>> halo_edges;
  std::vector<std::string> warnings;

  static int rank_of_block(int b) { return b / 3; }
  static BlockRegion region_of_block(int b) {
    return static_cast<BlockRegion>(b % 3);
  }
};

PartitionPlan make_block_plan(const VoronoiMesh& mesh, const RegionMap& map,
                              const std::vector<int>& rank_labels,
                              int n_ranks);

// Moves every interface-class cell (and therefore every interface-class
// edge) to rank 0's interface block; fine and coarse ownership is untouched;
// halos are rebuilt.
PartitionPlan concentrate_interface(const VoronoiMesh& mesh,
                                    const RegionMap& map,
                                    const PartitionPlan& plan);

struct ImbalanceReport {
  double fine_ratio = 1.0;       // max over ranks / mean, per class
  double coarse_ratio = 1.0;
  double interface_ratio = 1.0;
  double total_ratio = 1.0;
  // per rank: fine, coarse, interface, total owned cell counts
  std::vector<std::array<std::int64_t, 4>> rank_counts;
  std::string idle_risk;
};

ImbalanceReport imbalance_metrics(const PartitionPlan& plan,
                                  const RegionMap& map);

// CSV: block,rank,region,owned_cells,owned_edges,halo_cells,halo_edges.
std::string plan_to_csv(const PartitionPlan& plan);

}  // namespace mswm

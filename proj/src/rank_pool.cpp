#include "mswm/rank_pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mswm/errors.hpp"
#include "mswm/operators.hpp"

namespace mswm {

namespace {

// Group index of a cell, matching the GroupBit order (bit i = index i).
int cell_group_index(const RegionMap& map, int i) {
  switch (map.cell_label[i]) {
    case CellRegion::Fine:
      switch (map.cell_sublabel[i]) {
        case CellSub::UnderlineF1:
          return 1;
        case CellSub::UnderlineF2:
          return 2;
        default:
          return 0;
      }
    case CellRegion::Interface1:
      return 3;
    case CellRegion::Interface2:
      return 4;
    case CellRegion::Coarse:
      return 5;
  }
  return 5;
}

int edge_group_index(const RegionMap& map, int e) {
  switch (map.edge_label[e]) {
    case EdgeRegion::FineEdge:
      return 0;
    case EdgeRegion::UnderlineFineEdge:
      return 1;
    case EdgeRegion::Interface1Edge:
      return 2;
    case EdgeRegion::Interface2Edge:
      return 3;
    case EdgeRegion::CoarseEdge:
      return 4;
  }
  return 4;
}

std::vector<int> merged(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.resize(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  return out;
}

}  // namespace

ThreadedEvaluator::ThreadedEvaluator(const VoronoiMesh& mesh,
                                     const RegionMap& map,
                                     const PartitionPlan& plan,
                                     const CellField& b,
                                     const VertexField& f_vertex,
                                     double gravity, int replication)
    : mesh_(mesh),
      map_(map),
      plan_(plan),
      b_(b),
      f_(f_vertex),
      gravity_(gravity),
      replication_(replication),
      start_(plan.n_ranks + 1),
      done_(plan.n_ranks + 1),
      errors_(plan.n_ranks) {
  if (replication_ < 1)
    throw ConfigError("cost replication factor must be >= 1");
  if (plan_.block_of_cell.size() != static_cast<std::size_t>(mesh.n_cells) ||
      plan_.block_of_edge.size() != static_cast<std::size_t>(mesh.n_edges))
    throw UsageError("partition plan does not match the mesh");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  blocks_.resize(plan_.n_blocks);
  for (int bi = 0; bi < plan_.n_blocks; ++bi) {
    Block& blk = blocks_[bi];
    for (int c : plan_.owned_cells[bi])
      blk.cell_groups[cell_group_index(map_, c)].push_back(c);
    for (int e : plan_.owned_edges[bi])
      blk.edge_groups[edge_group_index(map_, e)].push_back(e);
    blk.data_cells = merged(plan_.owned_cells[bi], plan_.halo_cells[bi]);
    blk.data_edges = merged(plan_.owned_edges[bi], plan_.halo_edges[bi]);
    blk.h_buf.assign(mesh_.n_cells, nan);
    blk.u_buf.assign(mesh_.n_edges, nan);
    blk.scratch.bind(mesh_);
  }

  threads_.reserve(plan_.n_ranks);
  for (int r = 0; r < plan_.n_ranks; ++r)
    threads_.emplace_back([this, r] { worker_main(r); });
}

ThreadedEvaluator::~ThreadedEvaluator() {
  job_.stop = true;
  start_.arrive_and_wait();
  for (auto& t : threads_) t.join();
}

const std::pair<std::vector<int>, std::vector<int>>&
ThreadedEvaluator::block_sets(Block& blk, unsigned mask) {
  auto it = blk.set_cache.find(mask);
  if (it != blk.set_cache.end()) return it->second;
  std::pair<std::vector<int>, std::vector<int>> sets;
  for (int g = 0; g < 6; ++g)
    if (mask & (1u << g))
      sets.first.insert(sets.first.end(), blk.cell_groups[g].begin(),
                        blk.cell_groups[g].end());
  for (int g = 0; g < 5; ++g)
    if (mask & (1u << (6 + g)))
      sets.second.insert(sets.second.end(), blk.edge_groups[g].begin(),
                         blk.edge_groups[g].end());
  std::sort(sets.first.begin(), sets.first.end());
  std::sort(sets.second.begin(), sets.second.end());
  return blk.set_cache.emplace(mask, std::move(sets)).first->second;
}

void ThreadedEvaluator::run_rank(int rank) {
  for (int off = 0; off < 3; ++off) {
    Block& blk = blocks_[3 * rank + off];
    const auto& sets = block_sets(blk, job_.mask);
    if (sets.first.empty() && sets.second.empty()) continue;

    // Halo exchange: pull owned+halo values from the global snapshot.
    for (int c : blk.data_cells) blk.h_buf[c] = job_.h[c];
    for (int e : blk.data_edges) blk.u_buf[e] = job_.u[e];

    ElementSets es;
    es.cells = sets.first;
    es.edges = sets.second;
    shallow_water_tendencies(mesh_, blk.h_buf.data(), blk.u_buf.data(),
                             b_.ptr(), f_.ptr(), gravity_, es, job_.dh,
                             job_.du, blk.scratch, replication_);
  }
}

void ThreadedEvaluator::worker_main(int rank) {
  for (;;) {
    start_.arrive_and_wait();
    if (job_.stop) return;
    errors_[rank] = nullptr;
    try {
      run_rank(rank);
    } catch (...) {
      errors_[rank] = std::current_exception();
    }
    done_.arrive_and_wait();
  }
}

void ThreadedEvaluator::eval(const double* h, const double* u, unsigned mask,
                             double* dh, double* du) {
  job_.h = h;
  job_.u = u;
  job_.mask = mask;
  job_.dh = dh;
  job_.du = du;
  start_.arrive_and_wait();
  done_.arrive_and_wait();
  for (int r = 0; r < plan_.n_ranks; ++r) {
    if (errors_[r]) {
      std::exception_ptr e = errors_[r];
      for (auto& slot : errors_) slot = nullptr;
      std::rethrow_exception(e);
    }
  }
}

}  // namespace mswm

#pragma once

#include <barrier>
#include <exception>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mswm/integrators.hpp"
#include "mswm/partition.hpp"

namespace mswm {

// Emulates N message-passing ranks with persistent worker threads.  Each
// worker owns the three blocks of its rank (fine, coarse, interface) and
// iterates them serially.  Before evaluating a block, the worker copies the
// block's owned and halo data from the published global arrays into
// block-local buffers (the halo exchange), so every evaluation runs from a
// consistent snapshot.  Buffer entries outside owned+halo stay NaN, making
// an insufficient halo impossible to miss.  Workers write tendencies only
// for elements their blocks own, so the combined output is bitwise
// identical to the serial evaluator for any rank count.
class ThreadedEvaluator : public TendencyEvaluator {
 public:
  ThreadedEvaluator(const VoronoiMesh& mesh, const RegionMap& map,
                    const PartitionPlan& plan, const CellField& b,
                    const VertexField& f_vertex, double gravity,
                    int replication = 1);
  ~ThreadedEvaluator() override;

  ThreadedEvaluator(const ThreadedEvaluator&) = delete;
  ThreadedEvaluator& operator=(const ThreadedEvaluator&) = delete;

  void eval(const double* h, const double* u, unsigned mask, double* dh,
            double* du) override;

  int n_ranks() const { return plan_.n_ranks; }

 private:
  struct Block {
    // Owned elements split by region group, indexed like GroupBit.
    std::array<std::vector<int>, 6> cell_groups;
    std::array<std::vector<int>, 5> edge_groups;
    std::vector<int> data_cells;  // owned + halo, ascending
    std::vector<int> data_edges;
    std::vector<double> h_buf, u_buf;  // full-size, NaN outside data sets
    TendencyScratch scratch;
    std::unordered_map<unsigned, std::pair<std::vector<int>, std::vector<int>>>
        set_cache;
  };

  const std::pair<std::vector<int>, std::vector<int>>& block_sets(
      Block& blk, unsigned mask);
  void worker_main(int rank);
  void run_rank(int rank);

  const VoronoiMesh& mesh_;
  const RegionMap& map_;
  PartitionPlan plan_;
  const CellField& b_;
  const VertexField& f_;
  double gravity_;
  int replication_;

  std::vector<Block> blocks_;

  struct Job {
    const double* h = nullptr;
    const double* u = nullptr;
    unsigned mask = 0;
    double* dh = nullptr;
    double* du = nullptr;
    bool stop = false;
  };
  Job job_;
  std::barrier<> start_;
  std::barrier<> done_;
  std::vector<std::exception_ptr> errors_;
  std::vector<std::thread> threads_;
};

}  // namespace mswm

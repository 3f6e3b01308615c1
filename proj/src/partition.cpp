#include "mswm/partition.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <string>

#include "mswm/errors.hpp"

namespace mswm {

namespace {

// 0 = fine (underline sublabels included), 1 = coarse, 2 = interface.
int class_of_cell(const RegionMap& map, int i) {
  switch (map.cell_label[i]) {
    case CellRegion::Fine:
      return 0;
    case CellRegion::Coarse:
      return 1;
    default:
      return 2;
  }
}

int class_of_edge(const RegionMap& map, int e) {
  switch (map.edge_label[e]) {
    case EdgeRegion::FineEdge:
    case EdgeRegion::UnderlineFineEdge:
      return 0;
    case EdgeRegion::CoarseEdge:
      return 1;
    default:
      return 2;
  }
}

const char* kClassNames[3] = {"fine", "coarse", "interface"};

}  // namespace

std::size_t CellGraph::n_pairs() const {
  std::size_t total = 0;
  for (const auto& nbrs : adjacency) total += nbrs.size();
  return total / 2;
}

CellGraph build_cell_graph(const VoronoiMesh& mesh, const RegionMap* map) {
  CellGraph g;
  g.adjacency.resize(mesh.n_cells);
  for (int i = 0; i < mesh.n_cells; ++i) {
    auto ring = mesh.ring_cells(i);
    g.adjacency[i].assign(ring.begin(), ring.end());
    std::sort(g.adjacency[i].begin(), g.adjacency[i].end());
  }
  if (map) {
    if (map->cell_label.size() != static_cast<std::size_t>(mesh.n_cells))
      throw UsageError("region map does not match the mesh");
    g.weights.resize(mesh.n_cells);
    for (int i = 0; i < mesh.n_cells; ++i) {
      std::array<int, 3> w{0, 0, 0};
      // One-hot triplets: coarse (1,0,0), fine (0,1,0), interface (0,0,1).
      switch (class_of_cell(*map, static_cast<int>(i))) {
        case 0:
          w[1] = 1;
          break;
        case 1:
          w[0] = 1;
          break;
        default:
          w[2] = 1;
          break;
      }
      g.weights[i] = w;
    }
  }
  return g;
}

void write_graph(const VoronoiMesh& mesh, const RegionMap* map,
                 const std::string& path) {
  const CellGraph g = build_cell_graph(mesh, map);
  std::string out;
  out.reserve(g.n_cells() * 32);
  char buf[64];
  if (g.weighted()) {
    std::snprintf(buf, sizeof(buf), "%zu %zu 010 3\n", g.n_cells(),
                  g.n_pairs());
  } else {
    std::snprintf(buf, sizeof(buf), "%zu %zu\n", g.n_cells(), g.n_pairs());
  }
  out += buf;
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    bool first = true;
    if (g.weighted()) {
      std::snprintf(buf, sizeof(buf), "%d %d %d", g.weights[i][0],
                    g.weights[i][1], g.weights[i][2]);
      out += buf;
      first = false;
    }
    for (int nb : g.adjacency[i]) {
      std::snprintf(buf, sizeof(buf), first ? "%d" : " %d", nb + 1);
      out += buf;
      first = false;
    }
    out += '\n';
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot open '" + path + "' for writing");
  const std::size_t written = std::fwrite(out.data(), 1, out.size(), f);
  const int rc = std::fclose(f);
  if (written != out.size() || rc != 0)
    throw Error("failed writing graph file '" + path + "'");
}

std::vector<int> read_partition_file(const std::string& path, int n_parts,
                                     std::size_t expected_lines) {
  if (n_parts < 1) throw UsageError("partition file: n_parts must be >= 1");
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw Error("cannot open '" + path + "'");
  std::vector<int> labels;
  labels.reserve(expected_lines);
  char line[256];
  int lineno = 0;
  while (std::fgets(line, sizeof(line), f)) {
    ++lineno;
    char* p = line;
    while (*p == ' ' || *p == '\t') ++p;
    if (*p == '\n' || *p == '\0') continue;       // blank line
    if (*p == '#' || *p == '%') continue;         // comment line
    char* end = nullptr;
    const long v = std::strtol(p, &end, 10);
    while (end && (*end == ' ' || *end == '\t' || *end == '\n' ||
                   *end == '\r'))
      ++end;
    if (end == p || (end && *end != '\0')) {
      std::fclose(f);
      throw ParseError("partition file: expected a single integer", lineno);
    }
    if (v < 0 || v >= n_parts) {
      std::fclose(f);
      throw ParseError("partition file: label out of range [0, " +
                           std::to_string(n_parts) + ")",
                       lineno);
    }
    if (labels.size() == expected_lines) {
      std::fclose(f);
      throw ParseError("partition file: more labels than cells", lineno);
    }
    labels.push_back(static_cast<int>(v));
  }
  std::fclose(f);
  if (labels.size() != expected_lines)
    throw ParseError("partition file: expected " +
                         std::to_string(expected_lines) + " labels, found " +
                         std::to_string(labels.size()),
                     lineno + 1);
  return labels;
}

void write_partition_file(const std::vector<int>& labels,
                          const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot open '" + path + "' for writing");
  for (int v : labels) std::fprintf(f, "%d\n", v);
  if (std::fclose(f) != 0)
    throw Error("failed writing partition file '" + path + "'");
}

std::vector<int> partition_multiconstraint(
    const CellGraph& graph, int n_parts, std::uint64_t seed,
    std::vector<std::string>* warnings) {
  const int n = static_cast<int>(graph.n_cells());
  if (n_parts < 1) throw ConfigError("partition: n_parts must be >= 1");
  if (n_parts > n)
    throw ConfigError("partition: n_parts (" + std::to_string(n_parts) +
                      ") exceeds cell count (" + std::to_string(n) + ")");
  if (graph.weighted() && graph.weights.size() != graph.adjacency.size())
    throw UsageError("partition: weight table size mismatch");

  // Breadth-first sweep over the graph so consecutive cells in the visit
  // order are spatially close; slicing that order then yields compact parts.
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  const int start = (n > 0) ? static_cast<int>(seed % n) : 0;
  std::deque<int> queue;
  auto enqueue = [&](int c) {
    if (!seen[c]) {
      seen[c] = 1;
      queue.push_back(c);
    }
  };
  enqueue(start);
  int next_unseen = 0;
  while (static_cast<int>(order.size()) < n) {
    if (queue.empty()) {
      while (seen[next_unseen]) ++next_unseen;
      enqueue(next_unseen);
    }
    const int c = queue.front();
    queue.pop_front();
    order.push_back(c);
    for (int nb : graph.adjacency[c]) enqueue(nb);
  }

  // Class of each cell: single pseudo-class when unweighted.
  auto cls = [&](int i) -> int {
    if (!graph.weighted()) return 0;
    const auto& w = graph.weights[i];
    if (w[1]) return 0;
    if (w[0]) return 1;
    return 2;
  };
  const int n_classes = graph.weighted() ? 3 : 1;

  // Slice each class's subsequence of the sweep into n_parts consecutive
  // runs whose sizes differ by at most one.
  std::vector<std::int64_t> class_total(n_classes, 0);
  for (int i = 0; i < n; ++i) ++class_total[cls(i)];
  std::vector<int> labels(n, 0);
  std::vector<std::int64_t> assigned(n_classes, 0);
  for (int c : order) {
    const int k = cls(c);
    const std::int64_t t = class_total[k];
    const std::int64_t pos = assigned[k]++;
    // Balanced block distribution: position pos of t goes to part pos*N/t.
    labels[c] = static_cast<int>((pos * n_parts) / std::max<std::int64_t>(t, 1));
  }

  // Per-part class counts and the balance window the refinement keeps.
  std::vector<std::vector<std::int64_t>> counts(
      n_parts, std::vector<std::int64_t>(n_classes, 0));
  for (int i = 0; i < n; ++i) ++counts[labels[i]][cls(i)];
  std::vector<std::int64_t> lo(n_classes), hi(n_classes);
  for (int k = 0; k < n_classes; ++k) {
    lo[k] = class_total[k] / n_parts;
    hi[k] = (class_total[k] + n_parts - 1) / n_parts;
  }

  // One deterministic boundary pass: move a cell to its most common
  // neighboring part when that strictly reduces the cut and keeps every
  // class count inside [lo, hi].
  std::vector<int> freq(n_parts, 0);
  for (int i = 0; i < n; ++i) {
    const int p = labels[i];
    bool boundary = false;
    for (int nb : graph.adjacency[i])
      if (labels[nb] != p) {
        boundary = true;
        break;
      }
    if (!boundary) continue;
    int best = p;
    int best_count = 0, own_count = 0;
    for (int nb : graph.adjacency[i]) ++freq[labels[nb]];
    own_count = freq[p];
    for (int nb : graph.adjacency[i]) {
      const int q = labels[nb];
      if (freq[q] > best_count || (freq[q] == best_count && q < best)) {
        best = q;
        best_count = freq[q];
      }
    }
    for (int nb : graph.adjacency[i]) freq[labels[nb]] = 0;
    const int k = cls(i);
    if (best != p && best_count > own_count && counts[p][k] - 1 >= lo[k] &&
        counts[best][k] + 1 <= hi[k]) {
      labels[i] = best;
      --counts[p][k];
      ++counts[best][k];
    }
  }

  if (warnings) {
    for (int k = 0; k < n_classes; ++k) {
      if (class_total[k] == 0) continue;
      int empty = 0;
      for (int p = 0; p < n_parts; ++p)
        if (counts[p][k] == 0) ++empty;
      if (empty > 0) {
        warnings->push_back(
            std::to_string(empty) + " part(s) received no cells" +
            (graph.weighted()
                 ? " of class '" + std::string(kClassNames[k]) + "'"
                 : std::string()));
      }
    }
  }
  return labels;
}

const char* block_region_name(BlockRegion r) {
  switch (r) {
    case BlockRegion::Fine:
      return "fine";
    case BlockRegion::Coarse:
      return "coarse";
    case BlockRegion::Interface:
      return "interface";
  }
  return "?";
}

PartitionPlan make_block_plan(const VoronoiMesh& mesh, const RegionMap& map,
                              const std::vector<int>& rank_labels,
                              int n_ranks) {
  if (n_ranks < 1) throw ConfigError("block plan: need at least one rank");
  if (rank_labels.size() != static_cast<std::size_t>(mesh.n_cells))
    throw UsageError("block plan: rank labels must cover every cell");
  if (map.cell_label.size() != static_cast<std::size_t>(mesh.n_cells) ||
      map.edge_label.size() != static_cast<std::size_t>(mesh.n_edges))
    throw UsageError("block plan: region map does not match the mesh");
  for (std::size_t i = 0; i < rank_labels.size(); ++i)
    if (rank_labels[i] < 0 || rank_labels[i] >= n_ranks)
      throw ConfigError("block plan: rank label out of range at cell " +
                        std::to_string(i));

  PartitionPlan plan;
  plan.n_ranks = n_ranks;
  plan.n_blocks = 3 * n_ranks;
  plan.rank_of_cell = rank_labels;
  plan.block_of_cell.resize(mesh.n_cells);
  plan.block_of_edge.resize(mesh.n_edges);
  plan.owned_cells.assign(plan.n_blocks, {});
  plan.owned_edges.assign(plan.n_blocks, {});
  plan.halo_cells.assign(plan.n_blocks, {});
  plan.halo_edges.assign(plan.n_blocks, {});

  for (int i = 0; i < mesh.n_cells; ++i) {
    const int b = 3 * rank_labels[i] + class_of_cell(map, i);
    plan.block_of_cell[i] = b;
    plan.owned_cells[b].push_back(i);
  }

  for (int e = 0; e < mesh.n_edges; ++e) {
    const int k = class_of_edge(map, e);
    int owner_cell = -1;
    for (int c : mesh.edge_cells[e]) {
      if (class_of_cell(map, c) == k) {
        owner_cell = c;  // edge_cells is ascending: first match wins
        break;
      }
    }
    if (owner_cell < 0)
      throw TopologyError("edge " + std::to_string(e) +
                          " has no adjacent cell of its own region class");
    const int b = 3 * rank_labels[owner_cell] + k;
    plan.block_of_edge[e] = b;
    plan.owned_edges[b].push_back(static_cast<int>(e));
  }

  // Halos: cells within two hops of the owned set, then every edge touching
  // the widened cell set that the block does not own.
  std::vector<int> mark(mesh.n_cells, -1);
  std::vector<char> edge_mark(mesh.n_edges, 0);
  for (int b = 0; b < plan.n_blocks; ++b) {
    auto& owned = plan.owned_cells[b];
    for (int c : owned) mark[c] = b * 4 + 3;  // owned tag
    std::vector<int> frontier(owned), next;
    for (int hop = 0; hop < 2; ++hop) {
      next.clear();
      for (int c : frontier) {
        for (int nb : mesh.ring_cells(c)) {
          if (mark[nb] < b * 4) {
            mark[nb] = b * 4 + hop;
            next.push_back(nb);
            plan.halo_cells[b].push_back(nb);
          }
        }
      }
      frontier.swap(next);
    }
    std::sort(plan.halo_cells[b].begin(), plan.halo_cells[b].end());

    for (int e : plan.owned_edges[b]) edge_mark[e] = 1;
    auto scan_cell_edges = [&](int c) {
      for (int e : mesh.ring_edges(c)) {
        if (!edge_mark[e]) {
          edge_mark[e] = 1;
          plan.halo_edges[b].push_back(e);
        }
      }
    };
    for (int c : owned) scan_cell_edges(c);
    for (int c : plan.halo_cells[b]) scan_cell_edges(c);
    std::sort(plan.halo_edges[b].begin(), plan.halo_edges[b].end());
    for (int e : plan.owned_edges[b]) edge_mark[e] = 0;
    for (int e : plan.halo_edges[b]) edge_mark[e] = 0;
  }

  for (int r = 0; r < n_ranks; ++r) {
    for (int off = 0; off < 3; ++off) {
      if (plan.owned_cells[3 * r + off].empty())
        plan.warnings.push_back(
            "rank " + std::to_string(r) + " owns no " +
            block_region_name(static_cast<BlockRegion>(off)) + " cells");
    }
  }
  return plan;
}

PartitionPlan concentrate_interface(const VoronoiMesh& mesh,
                                    const RegionMap& map,
                                    const PartitionPlan& plan) {
  std::vector<int> labels = plan.rank_of_cell;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (class_of_cell(map, static_cast<int>(i)) == 2) labels[i] = 0;
  return make_block_plan(mesh, map, labels, plan.n_ranks);
}

ImbalanceReport imbalance_metrics(const PartitionPlan& plan,
                                  const RegionMap& map) {
  (void)map;
  ImbalanceReport rep;
  const int N = plan.n_ranks;
  rep.rank_counts.assign(N, {0, 0, 0, 0});
  for (int r = 0; r < N; ++r) {
    for (int off = 0; off < 3; ++off) {
      const auto n =
          static_cast<std::int64_t>(plan.owned_cells[3 * r + off].size());
      // rank_counts columns: fine, coarse, interface, total.
      rep.rank_counts[r][off] = n;
      rep.rank_counts[r][3] += n;
    }
  }
  auto ratio_of = [&](int col) {
    std::int64_t total = 0, mx = 0;
    for (int r = 0; r < N; ++r) {
      total += rep.rank_counts[r][col];
      mx = std::max(mx, rep.rank_counts[r][col]);
    }
    if (total == 0) return 1.0;
    return static_cast<double>(mx) * N / static_cast<double>(total);
  };
  rep.fine_ratio = ratio_of(0);
  rep.coarse_ratio = ratio_of(1);
  rep.interface_ratio = ratio_of(2);
  rep.total_ratio = ratio_of(3);

  double worst = rep.fine_ratio;
  const char* worst_name = "fine";
  if (rep.coarse_ratio > worst) {
    worst = rep.coarse_ratio;
    worst_name = "coarse";
  }
  if (rep.interface_ratio > worst) {
    worst = rep.interface_ratio;
    worst_name = "interface";
  }
  char buf[160];
  if (worst <= 1.25) {
    std::snprintf(buf, sizeof(buf), "balanced (worst class ratio %.3f)",
                  worst);
  } else {
    std::snprintf(buf, sizeof(buf),
                  "%s load concentrated (max/mean %.3f); other ranks idle "
                  "during its stages",
                  worst_name, worst);
  }
  rep.idle_risk = buf;
  return rep;
}

std::string plan_to_csv(const PartitionPlan& plan) {
  std::string out =
      "block,rank,region,owned_cells,owned_edges,halo_cells,halo_edges\n";
  char buf[160];
  for (int b = 0; b < plan.n_blocks; ++b) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%s,%zu,%zu,%zu,%zu\n", b,
                  PartitionPlan::rank_of_block(b),
                  block_region_name(PartitionPlan::region_of_block(b)),
                  plan.owned_cells[b].size(), plan.owned_edges[b].size(),
                  plan.halo_cells[b].size(), plan.halo_edges[b].size());
    out += buf;
  }
  return out;
}

}  // namespace mswm

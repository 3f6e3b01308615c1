#include <algorithm>
#include <fstream>
#include <limits>

#include "mswm/errors.hpp"
#include "mswm/regions.hpp"

namespace mswm {

namespace {

// Breadth-first cell distance from a source set, -1 when unreachable.
// Layers are expanded in ascending cell id for determinism.
std::vector<int> bfs_distance(const VoronoiMesh& mesh, const std::vector<int>& sources) {
  std::vector<int> dist(mesh.n_cells, -1);
  std::vector<int> frontier = sources;
  std::sort(frontier.begin(), frontier.end());
  for (int i : frontier) dist[i] = 0;
  int level = 0;
  while (!frontier.empty()) {
    ++level;
    std::vector<int> next;
    for (int i : frontier)
      for (int nb : mesh.ring_cells(i))
        if (dist[nb] == -1) { dist[nb] = level; next.push_back(nb); }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

void RegionMap::rebuild_groups(int n_cells, int n_edges) {
  cells_fine.clear(); cells_fine_plain.clear();
  cells_uf1.clear(); cells_uf2.clear();
  cells_if1.clear(); cells_if2.clear(); cells_coarse.clear();
  for (int i = 0; i < n_cells; ++i) {
    switch (cell_label[i]) {
      case CellRegion::Fine:
        cells_fine.push_back(i);
        if (!sublabels_assigned || cell_sublabel[i] == CellSub::None)
          cells_fine_plain.push_back(i);
        else if (cell_sublabel[i] == CellSub::UnderlineF1)
          cells_uf1.push_back(i);
        else
          cells_uf2.push_back(i);
        break;
      case CellRegion::Interface1: cells_if1.push_back(i); break;
      case CellRegion::Interface2: cells_if2.push_back(i); break;
      case CellRegion::Coarse: cells_coarse.push_back(i); break;
    }
  }
  edges_fine.clear(); edges_ufine.clear();
  edges_if1.clear(); edges_if2.clear(); edges_coarse.clear();
  if (edges_assigned)
    for (int e = 0; e < n_edges; ++e) {
      switch (edge_label[e]) {
        case EdgeRegion::FineEdge: edges_fine.push_back(e); break;
        case EdgeRegion::UnderlineFineEdge: edges_ufine.push_back(e); break;
        case EdgeRegion::Interface1Edge: edges_if1.push_back(e); break;
        case EdgeRegion::Interface2Edge: edges_if2.push_back(e); break;
        case EdgeRegion::CoarseEdge: edges_coarse.push_back(e); break;
      }
    }
}

RegionMap label_cells(const VoronoiMesh& mesh, const std::function<bool(int)>& fine_predicate,
                      int interface_width) {
  if (interface_width < 1) throw ConfigError("interface width must be >= 1");
  RegionMap map;
  map.interface_width = interface_width;
  map.cell_label.assign(mesh.n_cells, CellRegion::Coarse);
  map.cell_sublabel.assign(mesh.n_cells, CellSub::None);

  std::vector<int> fine;
  for (int i = 0; i < mesh.n_cells; ++i)
    if (fine_predicate(i)) { fine.push_back(i); map.cell_label[i] = CellRegion::Fine; }
  if (fine.empty()) throw ConfigError("fine predicate selects no cells");
  if (int(fine.size()) == mesh.n_cells)
    throw ConfigError("fine predicate selects every cell; no room for interface layers");

  std::vector<int> dist = bfs_distance(mesh, fine);
  int n_coarse = 0;
  for (int i = 0; i < mesh.n_cells; ++i) {
    if (dist[i] == 0) continue;
    if (dist[i] >= 1 && dist[i] <= interface_width)
      map.cell_label[i] = CellRegion::Interface1;
    else if (dist[i] > interface_width && dist[i] <= 2 * interface_width)
      map.cell_label[i] = CellRegion::Interface2;
    else
      ++n_coarse;  // includes unreachable components
  }
  for (int layer = 1; layer <= 2 * interface_width; ++layer)
    if (std::count(dist.begin(), dist.end(), layer) == 0)
      throw ConfigError("interface layer " + std::to_string(layer) +
                        " is empty; the non-fine region is too small for width " +
                        std::to_string(interface_width));
  if (n_coarse == 0)
    throw ConfigError("interface layers exhaust the non-fine cells; no coarse region left");

  map.rebuild_groups(mesh.n_cells, mesh.n_edges);
  return map;
}

std::vector<std::string> label_underline_fine(const VoronoiMesh& mesh, RegionMap& map) {
  std::vector<std::string> warnings;
  map.cell_sublabel.assign(mesh.n_cells, CellSub::None);
  for (int i = 0; i < mesh.n_cells; ++i) {
    if (map.cell_label[i] != CellRegion::Fine) continue;
    for (int nb : mesh.ring_cells(i))
      if (map.cell_label[nb] == CellRegion::Interface1) {
        map.cell_sublabel[i] = CellSub::UnderlineF1;
        break;
      }
  }
  for (int i = 0; i < mesh.n_cells; ++i) {
    if (map.cell_label[i] != CellRegion::Fine ||
        map.cell_sublabel[i] != CellSub::None)
      continue;
    for (int nb : mesh.ring_cells(i))
      if (map.cell_label[nb] == CellRegion::Fine &&
          map.cell_sublabel[nb] == CellSub::UnderlineF1) {
        map.cell_sublabel[i] = CellSub::UnderlineF2;
        break;
      }
  }
  map.sublabels_assigned = true;
  map.rebuild_groups(mesh.n_cells, mesh.n_edges);
  if (map.cells_uf1.empty())
    warnings.push_back("no fine cell touches Interface1; underline layers are empty");
  else if (map.cells_uf2.empty())
    warnings.push_back("fine region is one layer thick; second underline layer is empty "
                       "(third-order interface prediction degrades)");
  else if (map.cells_fine_plain.empty())
    warnings.push_back("fine region is only two layers thick; no plain fine cells remain");
  return warnings;
}

void label_edges(const VoronoiMesh& mesh, RegionMap& map) {
  // Rank of a cell in "fine side wins" precedence.
  auto rank = [&](int i) {
    switch (map.cell_label[i]) {
      case CellRegion::Fine:
        return map.cell_sublabel[i] == CellSub::None ? 0 : 1;
      case CellRegion::Interface1: return 2;
      case CellRegion::Interface2: return 3;
      case CellRegion::Coarse: return 4;
    }
    return 4;
  };
  static const EdgeRegion by_rank[5] = {
      EdgeRegion::FineEdge, EdgeRegion::UnderlineFineEdge, EdgeRegion::Interface1Edge,
      EdgeRegion::Interface2Edge, EdgeRegion::CoarseEdge};
  map.edge_label.assign(mesh.n_edges, EdgeRegion::CoarseEdge);
  for (int e = 0; e < mesh.n_edges; ++e)
    map.edge_label[e] =
        by_rank[std::min(rank(mesh.edge_cells[e][0]), rank(mesh.edge_cells[e][1]))];
  map.edges_assigned = true;
  map.rebuild_groups(mesh.n_cells, mesh.n_edges);
}

RegionMap make_regions(const VoronoiMesh& mesh, const std::function<bool(int)>& fine_predicate,
                       int interface_width, std::vector<std::string>* warnings) {
  RegionMap map = label_cells(mesh, fine_predicate, interface_width);
  auto warn = label_underline_fine(mesh, map);
  if (warnings) warnings->insert(warnings->end(), warn.begin(), warn.end());
  label_edges(mesh, map);
  return map;
}

RegionReport validate_regions(const VoronoiMesh& mesh, const RegionMap& map) {
  RegionReport rep;
  auto violate = [&](const std::string& msg) { rep.violations.push_back(msg); };

  rep.n_fine = map.n_fine();
  rep.n_if1 = map.n_if1();
  rep.n_if2 = map.n_if2();
  rep.n_coarse = map.n_coarse();
  rep.n_uf1 = int(map.cells_uf1.size());
  rep.n_uf2 = int(map.cells_uf2.size());

  if (int(map.cell_label.size()) != mesh.n_cells) {
    violate("cell label array size mismatch");
    return rep;
  }

  // Disjoint cover from the group lists.
  std::vector<int> seen(mesh.n_cells, 0);
  auto tally = [&](const std::vector<int>& ids) {
    for (int i : ids) {
      if (i < 0 || i >= mesh.n_cells) violate("cell id out of range in a group list");
      else ++seen[i];
    }
  };
  tally(map.cells_fine_plain); tally(map.cells_uf1); tally(map.cells_uf2);
  tally(map.cells_if1); tally(map.cells_if2); tally(map.cells_coarse);
  for (int i = 0; i < mesh.n_cells; ++i) {
    if (seen[i] == 0) { violate("cell " + std::to_string(i) + " has no region"); break; }
    if (seen[i] > 1) { violate("cell " + std::to_string(i) + " is in several regions"); break; }
  }
  for (int i : map.cells_uf1)
    if (map.cell_label[i] != CellRegion::Fine)
      { violate("underline layer 1 leaves the fine region at cell " + std::to_string(i)); break; }
  for (int i : map.cells_uf2)
    if (map.cell_label[i] != CellRegion::Fine)
      { violate("underline layer 2 leaves the fine region at cell " + std::to_string(i)); break; }

  // Layer distances from the fine set.
  if (!map.cells_fine.empty()) {
    std::vector<int> dist = bfs_distance(mesh, map.cells_fine);
    const int w = map.interface_width;
    for (int i = 0; i < mesh.n_cells; ++i) {
      int d = dist[i] == -1 ? std::numeric_limits<int>::max() : dist[i];
      switch (map.cell_label[i]) {
        case CellRegion::Fine:
          if (d != 0) violate("fine cell " + std::to_string(i) + " not in the fine set");
          break;
        case CellRegion::Interface1:
          if (d < 1 || d > w)
            violate("Interface1 cell " + std::to_string(i) + " at distance " +
                    std::to_string(dist[i]) + " from fine, expected 1.." + std::to_string(w));
          break;
        case CellRegion::Interface2:
          if (d <= w || d > 2 * w)
            violate("Interface2 cell " + std::to_string(i) + " at distance " +
                    std::to_string(dist[i]) + " from fine, expected " +
                    std::to_string(w + 1) + ".." + std::to_string(2 * w));
          break;
        case CellRegion::Coarse:
          if (d <= 2 * w)
            violate("coarse cell " + std::to_string(i) + " at distance " +
                    std::to_string(dist[i]) + " from fine, too close for width " +
                    std::to_string(w));
          break;
      }
      if (!rep.violations.empty() && rep.violations.size() > 16) break;
    }
  }

  // Underline layers, when assigned.
  if (map.sublabels_assigned) {
    for (int i : map.cells_fine) {
      bool touch_i1 = false, touch_uf1 = false;
      for (int nb : mesh.ring_cells(i)) {
        if (map.cell_label[nb] == CellRegion::Interface1) touch_i1 = true;
        if (map.cell_label[nb] == CellRegion::Fine &&
            map.cell_sublabel[nb] == CellSub::UnderlineF1)
          touch_uf1 = true;
      }
      CellSub want = touch_i1 ? CellSub::UnderlineF1
                              : (touch_uf1 ? CellSub::UnderlineF2 : CellSub::None);
      if (map.cell_sublabel[i] != want) {
        violate("fine cell " + std::to_string(i) + " has the wrong underline sublabel");
        break;
      }
    }
  }

  // Edge labels, when assigned: recompute and compare, plus cover.
  if (map.edges_assigned) {
    if (int(map.edge_label.size()) != mesh.n_edges) {
      violate("edge label array size mismatch");
      return rep;
    }
    std::vector<int> eseen(mesh.n_edges, 0);
    auto etally = [&](const std::vector<int>& ids) {
      for (int e : ids) {
        if (e < 0 || e >= mesh.n_edges) violate("edge id out of range in a group list");
        else ++eseen[e];
      }
    };
    etally(map.edges_fine); etally(map.edges_ufine);
    etally(map.edges_if1); etally(map.edges_if2); etally(map.edges_coarse);
    for (int e = 0; e < mesh.n_edges; ++e)
      if (eseen[e] != 1) { violate("edge " + std::to_string(e) + " not covered exactly once"); break; }

    RegionMap redo = map;
    label_edges(mesh, redo);
    for (int e = 0; e < mesh.n_edges; ++e)
      if (redo.edge_label[e] != map.edge_label[e]) {
        violate("edge " + std::to_string(e) + " label disagrees with the fine-side-wins rule");
        break;
      }
  }
  return rep;
}

void write_regions(const RegionMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  static const int label_code[4] = {1, 2, 3, 4};  // fine, coarse, if1, if2 in file order
  for (int i = 0; i < int(map.cell_label.size()); ++i) {
    int label = 0;
    switch (map.cell_label[i]) {
      case CellRegion::Fine: label = label_code[0]; break;
      case CellRegion::Coarse: label = label_code[1]; break;
      case CellRegion::Interface1: label = label_code[2]; break;
      case CellRegion::Interface2: label = label_code[3]; break;
    }
    int sub = 0;
    if (map.cell_sublabel[i] == CellSub::UnderlineF1) sub = 5;
    else if (map.cell_sublabel[i] == CellSub::UnderlineF2) sub = 7;
    out << i << ' ' << label << ' ' << sub << '\n';
  }
  if (!out) throw Error("failed writing " + path);
}

RegionMap read_regions(const VoronoiMesh& mesh, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  RegionMap map;
  map.cell_label.assign(mesh.n_cells, CellRegion::Coarse);
  map.cell_sublabel.assign(mesh.n_cells, CellSub::None);
  std::vector<char> got(mesh.n_cells, 0);
  int id, label, sub, line = 0;
  std::string buf;
  while (std::getline(in, buf)) {
    ++line;
    if (buf.empty() || buf[0] == '#') continue;
    if (sscanf(buf.c_str(), "%d %d %d", &id, &label, &sub) != 3)
      throw ParseError("expected 'cell_id label sublabel'", line);
    if (id < 0 || id >= mesh.n_cells)
      throw ParseError("cell id " + std::to_string(id) + " out of range", line);
    if (got[id]) throw ParseError("cell " + std::to_string(id) + " listed twice", line);
    got[id] = 1;
    switch (label) {
      case 1: map.cell_label[id] = CellRegion::Fine; break;
      case 2: map.cell_label[id] = CellRegion::Coarse; break;
      case 3: map.cell_label[id] = CellRegion::Interface1; break;
      case 4: map.cell_label[id] = CellRegion::Interface2; break;
      default: throw ParseError("unknown region label " + std::to_string(label), line);
    }
    if (sub == 5) map.cell_sublabel[id] = CellSub::UnderlineF1;
    else if (sub == 7) map.cell_sublabel[id] = CellSub::UnderlineF2;
    else if (sub != 0) throw ParseError("unknown sublabel " + std::to_string(sub), line);
  }
  for (int i = 0; i < mesh.n_cells; ++i)
    if (!got[i]) throw ParseError("cell " + std::to_string(i) + " missing from region file", 0);

  map.sublabels_assigned = true;
  map.rebuild_groups(mesh.n_cells, mesh.n_edges);
  // Interface width is not stored; recover it as the deepest Interface1 layer.
  map.interface_width = 1;
  if (!map.cells_fine.empty() && !map.cells_if1.empty()) {
    std::vector<int> dist = bfs_distance(mesh, map.cells_fine);
    int w = 0;
    for (int i : map.cells_if1) w = std::max(w, dist[i]);
    map.interface_width = std::max(1, w);
  }
  label_edges(mesh, map);
  return map;
}

}  // namespace mswm

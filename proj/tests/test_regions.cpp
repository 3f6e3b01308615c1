#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mswm/errors.hpp"
#include "mswm/geometry.hpp"
#include "mswm/mesh.hpp"
#include "mswm/regions.hpp"

using namespace mswm;

namespace {

// Independent hop-distance computation (queue-based, no layer batching).
std::vector<int> hop_distance(const VoronoiMesh& mesh, const std::vector<char>& source) {
  std::vector<int> dist(mesh.n_cells, -1);
  std::deque<int> q;
  for (int i = 0; i < mesh.n_cells; ++i)
    if (source[i]) { dist[i] = 0; q.push_back(i); }
  while (!q.empty()) {
    int i = q.front();
    q.pop_front();
    for (int nb : mesh.ring_cells(i))
      if (dist[nb] == -1) { dist[nb] = dist[i] + 1; q.push_back(nb); }
  }
  return dist;
}

bool ascending_unique(const std::vector<int>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) return false;
  return true;
}

std::function<bool(int)> cap_predicate(const VoronoiMesh& mesh, const Vec3& center,
                                       double radius) {
  return [&mesh, center, radius](int i) {
    return arc_angle(mesh.cell_xyz[i], center) < radius;
  };
}

}  // namespace

TEST_CASE("cell labels follow hop-distance bands from the fine set") {
  VoronoiMesh mesh = generate_icosphere_mesh(2, 5, 1.0);
  Vec3 center = from_lonlat(4.71238898038469, 0.5235987755982988);

  for (int width : {1, 2}) {
    RegionMap map = make_regions(mesh, cap_predicate(mesh, center, 0.45), width);

    std::vector<char> fine(mesh.n_cells, 0);
    for (int i = 0; i < mesh.n_cells; ++i)
      fine[i] = arc_angle(mesh.cell_xyz[i], center) < 0.45 ? 1 : 0;
    std::vector<int> dist = hop_distance(mesh, fine);

    for (int i = 0; i < mesh.n_cells; ++i) {
      CellRegion want;
      if (dist[i] == 0) want = CellRegion::Fine;
      else if (dist[i] <= width) want = CellRegion::Interface1;
      else if (dist[i] <= 2 * width) want = CellRegion::Interface2;
      else want = CellRegion::Coarse;
      CHECK(map.cell_label[i] == want);
    }
    CHECK(map.interface_width == width);

    // Group lists: ascending ids, one list per cell.
    for (const auto* g : {&map.cells_fine_plain, &map.cells_uf1, &map.cells_uf2,
                          &map.cells_if1, &map.cells_if2, &map.cells_coarse})
      CHECK(ascending_unique(*g));
    size_t covered = map.cells_fine_plain.size() + map.cells_uf1.size() +
                     map.cells_uf2.size() + map.cells_if1.size() +
                     map.cells_if2.size() + map.cells_coarse.size();
    CHECK(covered == size_t(mesh.n_cells));
    CHECK(map.cells_fine.size() ==
          map.cells_fine_plain.size() + map.cells_uf1.size() + map.cells_uf2.size());
  }
}

TEST_CASE("underline layers hug the first interface band") {
  VoronoiMesh mesh = generate_icosphere_mesh(2, 5, 1.0);
  Vec3 center = from_lonlat(0.8, -0.3);
  RegionMap map = make_regions(mesh, cap_predicate(mesh, center, 0.55), 1);

  for (int i = 0; i < mesh.n_cells; ++i) {
    if (map.cell_label[i] != CellRegion::Fine) {
      CHECK(map.cell_sublabel[i] == CellSub::None);
      continue;
    }
    bool touch_if1 = false, touch_uf1 = false;
    for (int nb : mesh.ring_cells(i)) {
      touch_if1 |= map.cell_label[nb] == CellRegion::Interface1;
      touch_uf1 |= map.cell_label[nb] == CellRegion::Fine &&
                   map.cell_sublabel[nb] == CellSub::UnderlineF1;
    }
    CellSub want = touch_if1 ? CellSub::UnderlineF1
                             : (touch_uf1 ? CellSub::UnderlineF2 : CellSub::None);
    CHECK(map.cell_sublabel[i] == want);
  }
}

TEST_CASE("edge labels pick the finer side of each edge") {
  VoronoiMesh mesh = generate_icosphere_mesh(2, 5, 1.0);
  Vec3 center = from_lonlat(2.0, 0.4);
  RegionMap map = make_regions(mesh, cap_predicate(mesh, center, 0.5), 1);

  auto rank = [&](int i) {
    switch (map.cell_label[i]) {
      case CellRegion::Fine:
        return map.cell_sublabel[i] == CellSub::None ? 0 : 1;
      case CellRegion::Interface1: return 2;
      case CellRegion::Interface2: return 3;
      default: return 4;
    }
  };
  const EdgeRegion by_rank[5] = {EdgeRegion::FineEdge, EdgeRegion::UnderlineFineEdge,
                                 EdgeRegion::Interface1Edge, EdgeRegion::Interface2Edge,
                                 EdgeRegion::CoarseEdge};
  int n_checked = 0;
  for (int e = 0; e < mesh.n_edges; ++e) {
    int r = std::min(rank(mesh.edge_cells[e][0]), rank(mesh.edge_cells[e][1]));
    CHECK(map.edge_label[e] == by_rank[r]);
    ++n_checked;
  }
  CHECK(n_checked == mesh.n_edges);

  size_t covered = map.edges_fine.size() + map.edges_ufine.size() + map.edges_if1.size() +
                   map.edges_if2.size() + map.edges_coarse.size();
  CHECK(covered == size_t(mesh.n_edges));
  CHECK(!map.edges_ufine.empty());  // underline cells exist, so their edges do too
}

TEST_CASE("validate_regions passes good maps and flags tampered ones") {
  VoronoiMesh mesh = generate_icosphere_mesh(2, 5, 1.0);
  Vec3 center = from_lonlat(4.0, 0.1);
  RegionMap map = make_regions(mesh, cap_predicate(mesh, center, 0.5), 1);

  RegionReport rep = validate_regions(mesh, map);
  CHECK(rep.ok());
  CHECK(rep.n_fine == int(map.cells_fine.size()));
  CHECK(rep.n_if1 == int(map.cells_if1.size()));
  CHECK(rep.n_coarse == int(map.cells_coarse.size()));

  RegionMap bad = map;
  bad.cell_label[map.cells_coarse.front()] = CellRegion::Fine;  // distant rogue fine cell
  bad.rebuild_groups(mesh.n_cells, mesh.n_edges);
  CHECK(!validate_regions(mesh, bad).ok());
}

TEST_CASE("degenerate fine sets are rejected") {
  VoronoiMesh mesh = generate_icosphere_mesh(1, 3, 1.0);
  CHECK_THROWS_AS(label_cells(mesh, [](int) { return false; }, 1), ConfigError);
  CHECK_THROWS_AS(label_cells(mesh, [](int) { return true; }, 1), ConfigError);
  CHECK_THROWS_AS(label_cells(mesh, [](int i) { return i == 0; }, 0), ConfigError);
  // Interface layers that would swallow the whole sphere.
  CHECK_THROWS_AS(label_cells(mesh, [](int i) { return i == 0; }, 40), ConfigError);
}

TEST_CASE("thin fine regions come with warnings") {
  VoronoiMesh mesh = generate_icosphere_mesh(2, 5, 1.0);

  std::vector<std::string> w1;
  RegionMap one = make_regions(mesh, [](int i) { return i == 0; }, 1, &w1);
  CHECK(one.cells_uf1.size() == 1);
  CHECK(one.cells_uf2.empty());
  REQUIRE(!w1.empty());
  CHECK(w1.front().find("underline") != std::string::npos);

  std::vector<char> two(mesh.n_cells, 0);
  two[0] = 1;
  for (int nb : mesh.ring_cells(0)) two[nb] = 1;
  std::vector<std::string> w2;
  RegionMap pair = make_regions(mesh, [&](int i) { return two[i] != 0; }, 1, &w2);
  CHECK(pair.cells_fine_plain.empty());
  CHECK(!pair.cells_uf2.empty());
  CHECK(!w2.empty());
}

TEST_CASE("region files round trip labels, sublabels and width") {
  VoronoiMesh mesh = generate_icosphere_mesh(2, 5, 1.0);
  Vec3 center = from_lonlat(1.2, 0.6);
  const std::string path = "test_regions_rt.txt";

  for (int width : {1, 2}) {
    RegionMap map = make_regions(mesh, cap_predicate(mesh, center, 0.55), width);
    write_regions(map, path);
    RegionMap back = read_regions(mesh, path);
    CHECK(back.cell_label == map.cell_label);
    CHECK(back.cell_sublabel == map.cell_sublabel);
    CHECK(back.edge_label == map.edge_label);
    CHECK(back.interface_width == map.interface_width);
    CHECK(validate_regions(mesh, back).ok());
  }
  std::remove(path.c_str());
}

TEST_CASE("region reader skips comments and reports bad lines") {
  VoronoiMesh mesh = generate_icosphere_mesh(0, 0, 1.0);
  RegionMap map = make_regions(mesh, [](int i) { return i == 0; }, 1);
  const std::string path = "test_regions_bad.txt";

  {  // comment prefix is fine
    std::stringstream body;
    body << "# header comment\n";
    for (int i = 0; i < mesh.n_cells; ++i) {
      int label = map.cell_label[i] == CellRegion::Fine        ? 1
                  : map.cell_label[i] == CellRegion::Coarse    ? 2
                  : map.cell_label[i] == CellRegion::Interface1 ? 3
                                                                : 4;
      int sub = map.cell_sublabel[i] == CellSub::UnderlineF1   ? 5
                : map.cell_sublabel[i] == CellSub::UnderlineF2 ? 7
                                                               : 0;
      body << i << ' ' << label << ' ' << sub << '\n';
    }
    std::ofstream(path) << body.str();
    RegionMap back = read_regions(mesh, path);
    CHECK(back.cell_label == map.cell_label);
  }

  auto expect_parse_error_at = [&](const std::string& text, int line) {
    std::ofstream(path) << text;
    bool threw = false;
    try {
      read_regions(mesh, path);
    } catch (const ParseError& err) {
      threw = true;
      CHECK(err.line == line);
    }
    CHECK(threw);
  };

  expect_parse_error_at("0 1 0\nwhat is this\n", 2);
  expect_parse_error_at("0 9 0\n", 1);          // unknown label
  expect_parse_error_at("0 1 6\n", 1);          // unknown sublabel
  expect_parse_error_at("0 1 0\n0 2 0\n", 2);   // duplicate cell
  expect_parse_error_at("99 1 0\n", 1);         // id out of range
  expect_parse_error_at("0 1 0\n", 0);          // cells missing entirely
  std::remove(path.c_str());
}

TEST_CASE("group rebuilding honours hand-written label arrays") {
  RegionMap map;
  map.cell_label = {CellRegion::Fine, CellRegion::Fine, CellRegion::Interface1,
                    CellRegion::Interface2, CellRegion::Coarse, CellRegion::Coarse};
  map.cell_sublabel.assign(6, CellSub::None);
  map.cell_sublabel[1] = CellSub::UnderlineF1;
  map.sublabels_assigned = true;
  map.rebuild_groups(6, 0);

  CHECK(map.cells_fine == std::vector<int>{0, 1});
  CHECK(map.cells_fine_plain == std::vector<int>{0});
  CHECK(map.cells_uf1 == std::vector<int>{1});
  CHECK(map.cells_if1 == std::vector<int>{2});
  CHECK(map.cells_if2 == std::vector<int>{3});
  CHECK(map.cells_coarse == std::vector<int>{4, 5});

  // Without sublabel bookkeeping every fine cell counts as plain.
  map.sublabels_assigned = false;
  map.rebuild_groups(6, 0);
  CHECK(map.cells_fine_plain == std::vector<int>{0, 1});
  CHECK(map.cells_uf1.empty());
}

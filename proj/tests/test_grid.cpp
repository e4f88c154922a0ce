#include <algorithm>

#include "bmot/grid.hpp"
#include "doctest.h"

using bmot::ActiveSet;
using bmot::AxisIndex;
using bmot::Density;
using bmot::FrozenHalo;
using bmot::GridGeometry;
using bmot::NeighborKind;
using bmot::NeighborRef;

TEST_CASE("widths and cell counts") {
  GridGeometry g{2, 1.0, 4};
  CHECK(g.width(1) == doctest::Approx(0.0625));
  CHECK(g.width(2) == doctest::Approx(0.03125));
  CHECK(g.cells_per_axis(1) == 16);
  CHECK(g.cells_per_axis(3) == 64);
  GridGeometry half{2, 0.5, 4};
  CHECK(half.cells_per_axis(1) == 8);
  GridGeometry bad{2, 0.3, 1};
  CHECK_THROWS_AS(bad.cells_per_axis(1), bmot::ConfigError);
}

TEST_CASE("key packing is order-preserving") {
  AxisIndex a{1, 2, 0, 0}, b{1, 3, 0, 0}, c{2, 0, 0, 0};
  CHECK(bmot::pack_key(a, 2) < bmot::pack_key(b, 2));
  CHECK(bmot::pack_key(b, 2) < bmot::pack_key(c, 2));
  CHECK(bmot::unpack_key(bmot::pack_key(b, 2), 2) == b);
  AxisIndex d3{7, 11, 13, 0};
  CHECK(bmot::unpack_key(bmot::pack_key(d3, 3), 3) == d3);
}

TEST_CASE("ancestors walk up the refinement tree") {
  AxisIndex idx{13, 6, 0, 0};
  std::uint64_t key = bmot::pack_key(idx, 2);
  AxisIndex up1 = bmot::unpack_key(bmot::ancestor_key(key, 2, 1), 2);
  CHECK(up1[0] == 6);
  CHECK(up1[1] == 3);
  AxisIndex up2 = bmot::unpack_key(bmot::ancestor_key(key, 2, 2), 2);
  CHECK(up2[0] == 3);
  CHECK(up2[1] == 1);
}

TEST_CASE("box geometry: rects are centered on the cell lattice") {
  GridGeometry g{2, 1.0, 4};
  std::uint64_t key = bmot::pack_key({3, 5, 0, 0}, 2);
  bmot::Rect r = bmot::box_rect(g, 1, key);
  CHECK(r.lo[0] == doctest::Approx(3.0 / 16));
  CHECK(r.hi[0] == doctest::Approx(4.0 / 16));
  CHECK(r.lo[1] == doctest::Approx(5.0 / 16));
  bmot::Point c = bmot::box_center(g, 1, key);
  CHECK(c[0] == doctest::Approx(3.5 / 16));
  CHECK(c[1] == doctest::Approx(5.5 / 16));
}

TEST_CASE("initial grid covers the uniform domain, sorted by key") {
  GridGeometry g{2, 1.0, 2};  // 4x4
  Density d = Density::uniform(2, 1.0);
  ActiveSet active = bmot::initial_grid(g, d, 2);
  CHECK(active.size() == 16);
  CHECK(std::is_sorted(active.keys.begin(), active.keys.end()));
  double total = 0;
  for (double m : active.mass) {
    CHECK(m == doctest::Approx(1.0 / 16));
    total += m;
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("initial grid skips structurally zero boxes") {
  // Density supported on the right half only.
  bmot::DensityPiece p;
  p.region.dim = 2;
  p.region.lo = {0.5, 0.0, 0, 0};
  p.region.hi = {1.0, 1.0, 0, 0};
  Density d = Density::build({p}, 2, 1.0);
  GridGeometry g{2, 1.0, 2};
  ActiveSet active = bmot::initial_grid(g, d, 1);
  CHECK(active.size() == 8);
}

TEST_CASE("neighbor classification and edge marking") {
  GridGeometry g{2, 1.0, 2};
  Density d = Density::uniform(2, 1.0);
  ActiveSet active = bmot::initial_grid(g, d, 1);
  FrozenHalo halo;

  // Corner box (0,0): three in-domain neighbors, five outside.
  std::ptrdiff_t corner = active.find(bmot::pack_key({0, 0, 0, 0}, 2));
  REQUIRE(corner >= 0);
  NeighborRef refs[80];
  int count = bmot::collect_neighbors(g, halo, active, corner, refs);
  CHECK(count == 8);
  int outside = 0, in_active = 0;
  for (int k = 0; k < count; ++k) {
    if (refs[k].kind == NeighborKind::kOutside) ++outside;
    if (refs[k].kind == NeighborKind::kActive) ++in_active;
  }
  CHECK(outside == 5);
  CHECK(in_active == 3);

  bmot::mark_edges(g, halo, active, 2);
  int edges = 0;
  for (std::uint8_t f : active.flags)
    if (f & bmot::kBoxEdge) ++edges;
  CHECK(edges == 12);  // the 4x4 ring
}

TEST_CASE("frozen halo lookups cross levels") {
  FrozenHalo halo;
  // Freeze box (1, 2) at level 1.
  halo.add(1, bmot::pack_key({1, 2, 0, 0}, 2), 7);
  halo.finish_level(1);
  // A level-3 descendant: indices scale by 4.
  std::uint64_t deep = bmot::pack_key({4 * 1 + 3, 4 * 2 + 1, 0, 0}, 2);
  CHECK(halo.lookup(3, deep, 2) == 7);
  // A level-3 box elsewhere misses.
  CHECK(halo.lookup(3, bmot::pack_key({0, 0, 0, 0}, 2), 2) == -1);
  // Same-level lookup.
  CHECK(halo.lookup(1, bmot::pack_key({1, 2, 0, 0}, 2), 2) == 7);
}

TEST_CASE("refinement splits boxes and conserves mass") {
  GridGeometry g{2, 1.0, 2};
  Density d = Density::uniform(2, 1.0);
  ActiveSet active = bmot::initial_grid(g, d, 1);
  for (std::size_t i = 0; i < active.size(); ++i)
    active.label[i] = static_cast<std::int32_t>(i % 3);
  ActiveSet fine = bmot::refine(g, d, active, 2);
  CHECK(fine.level == 2);
  CHECK(fine.size() == 64);
  CHECK(std::is_sorted(fine.keys.begin(), fine.keys.end()));
  double total = 0;
  for (double m : fine.mass) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  // Children inherit the parent label.
  std::ptrdiff_t child = fine.find(bmot::pack_key({1, 0, 0, 0}, 2));
  REQUIRE(child >= 0);
  std::ptrdiff_t parent = active.find(bmot::pack_key({0, 0, 0, 0}, 2));
  CHECK(fine.label[child] == active.label[parent]);
}

TEST_CASE("three-dimensional neighborhood size") {
  GridGeometry g{3, 1.0, 1};
  Density d = Density::uniform(3, 1.0);
  ActiveSet active = bmot::initial_grid(g, d, 1);
  CHECK(active.size() == 8);
  FrozenHalo halo;
  NeighborRef refs[80];
  int count = bmot::collect_neighbors(g, halo, active, 0, refs);
  CHECK(count == 26);
}

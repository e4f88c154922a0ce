#include <cmath>
#include <random>

#include "bmot/shifts.hpp"
#include "doctest.h"

using bmot::AdjacencyEdge;
using bmot::GroundCost;
using bmot::Point;

namespace {

AdjacencyEdge edge(int i, int j, double estimate, double error_bound) {
  AdjacencyEdge e;
  e.i = i;
  e.j = j;
  e.estimate = estimate;
  e.error_bound = error_bound;
  return e;
}

}  // namespace

TEST_CASE("adjacency collection finds the half-and-half split") {
  bmot::GridGeometry g;
  g.dim = 2;
  g.side = 1.0;
  g.initial_exponent = 2;  // 4x4 cells at level 1

  bmot::ActiveSet active;
  active.level = 1;
  for (std::uint32_t ix = 0; ix < 4; ++ix) {
    for (std::uint32_t iy = 0; iy < 4; ++iy) {
      bmot::AxisIndex idx{ix, iy, 0, 0};
      active.keys.push_back(bmot::pack_key(idx, 2));
      active.mass.push_back(1.0 / 16.0);
      active.label.push_back(ix < 2 ? 0 : 1);  // left half vs right half
      active.flags.push_back(0);
    }
  }

  GroundCost l2;
  std::vector<Point> targets = {Point{0.25, 0.5, 0, 0}, Point{0.75, 0.5, 0, 0}};
  bmot::FrozenHalo halo;
  auto edges = bmot::collect_adjacency(g, l2, targets, active, halo);

  REQUIRE(edges.size() == 1);
  CHECK(edges[0].i == 0);
  CHECK(edges[0].j == 1);
  // Witness midpoints sit on the x = 1/2 line, equidistant from both
  // targets, so the estimated shift difference is exactly zero.
  CHECK(edges[0].estimate == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(edges[0].error_bound > 0);
  // The cheapest witness pair is horizontally adjacent across the split.
  auto bi = bmot::unpack_key(edges[0].box_i, 2);
  auto bj = bmot::unpack_key(edges[0].box_j, 2);
  CHECK(((bi[0] == 1 && bj[0] == 2) || (bi[0] == 2 && bj[0] == 1)));
  CHECK(bi[1] == bj[1]);
}

TEST_CASE("tree propagation from the anchor") {
  // Star around node 1 plus a tail; estimates encode a_i - a_j.
  std::vector<AdjacencyEdge> edges = {
      edge(0, 1, 1.0, 0.1),
      edge(1, 2, 0.5, 0.1),
      edge(1, 3, -0.25, 0.1),
  };
  auto s = bmot::solve_shifts(4, edges);
  CHECK(s.anchor == 1);
  CHECK(s.value[1] == 0.0);
  CHECK(s.value[0] == doctest::Approx(1.0));
  CHECK(s.value[2] == doctest::Approx(-0.5));
  CHECK(s.value[3] == doctest::Approx(0.25));
  CHECK(s.edges_used == 3);
  CHECK(s.error_bound[1] == 0.0);
  CHECK(s.error_bound[0] == doctest::Approx(0.1));
}

TEST_CASE("error bounds accumulate along tree paths") {
  std::vector<AdjacencyEdge> edges = {
      edge(0, 1, 0.0, 0.1),
      edge(1, 2, 0.0, 0.2),
      edge(2, 3, 0.0, 0.4),
  };
  auto s = bmot::solve_shifts(4, edges);
  CHECK(s.anchor == 1);  // degree-2 tie broken to the lowest id
  CHECK(s.error_bound[0] == doctest::Approx(0.1));
  CHECK(s.error_bound[2] == doctest::Approx(0.2));
  CHECK(s.error_bound[3] == doctest::Approx(0.2 + 0.4));
}

TEST_CASE("redundant edges do not double-assign") {
  // A cycle: the consistent estimates must not disturb the tree values.
  std::vector<AdjacencyEdge> edges = {
      edge(0, 1, 1.0, 0.1),
      edge(1, 2, 1.0, 0.1),
      edge(0, 2, 2.0, 0.5),
  };
  auto s = bmot::solve_shifts(3, edges);
  CHECK(s.edges_used == 2);
  CHECK(s.value[s.anchor] == 0.0);
  // Differences survive regardless of the anchor choice.
  CHECK(s.value[0] - s.value[1] == doctest::Approx(1.0));
  CHECK(s.value[1] - s.value[2] == doctest::Approx(1.0));
}

TEST_CASE("disconnected adjacency is rejected") {
  std::vector<AdjacencyEdge> edges = {edge(0, 1, 0.5, 0.1)};
  CHECK_THROWS_AS(bmot::solve_shifts(4, edges), bmot::NumericalError);
  CHECK_THROWS_AS(bmot::solve_shifts(3, edges), bmot::NumericalError);
  CHECK_NOTHROW(bmot::solve_shifts(2, edges));
}

TEST_CASE("partition labels follow the shifted cost") {
  GroundCost l2;
  std::vector<Point> targets = {Point{0.25, 0.5, 0, 0}, Point{0.75, 0.5, 0, 0}};
  std::vector<double> shifts = {0.0, 0.0};
  double mid[2] = {0.5, 0.5};
  // Exact tie: the lower id wins.
  CHECK(bmot::partition_label(l2, targets, shifts, mid, 2) == 0);
  double right[2] = {0.6, 0.5};
  CHECK(bmot::partition_label(l2, targets, shifts, right, 2) == 1);
  // A large shift moves the watershed.
  std::vector<double> tilted = {0.4, 0.0};
  CHECK(bmot::partition_label(l2, targets, tilted, right, 2) == 0);
}

TEST_CASE("labels are invariant under a common gauge shift") {
  GroundCost l2;
  std::vector<Point> targets = {
      Point{0.2, 0.3, 0, 0}, Point{0.8, 0.4, 0, 0}, Point{0.5, 0.9, 0, 0}};
  std::vector<double> shifts = {0.05, -0.02, 0.11};
  std::vector<double> shifted = shifts;
  for (auto& v : shifted) v += 0.3;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    double x[2] = {u(rng), u(rng)};
    CHECK(bmot::partition_label(l2, targets, shifts, x, 2) ==
          bmot::partition_label(l2, targets, shifted, x, 2));
  }
}

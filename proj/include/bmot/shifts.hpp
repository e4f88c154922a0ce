#pragma once

#include <cstdint>
#include <vector>

#include "bmot/grid.hpp"
#include "bmot/ground_cost.hpp"

namespace bmot {

// Evidence that regions i and j touch: the cheapest pair of adjacent
// boundary boxes carrying the two labels.  `estimate` approximates the shift
// difference a_i - a_j from the pair midpoint.
struct AdjacencyEdge {
  std::int32_t i = -1;  // i < j
  std::int32_t j = -1;
  double estimate = 0.0;
  double pair_cost = 0.0;     // c(center_i, center_j), minimized over pairs
  double error_bound = 0.0;   // |estimate - (a_i - a_j)| bound
  std::uint64_t box_i = 0;    // witness box keys
  std::uint64_t box_j = 0;
};

// Scans the final boundary for adjacent boxes with different labels and
// keeps, per label pair, the witness with the cheapest center-to-center
// cost (ties to the lower box keys).
std::vector<AdjacencyEdge> collect_adjacency(const GridGeometry& g,
                                             const GroundCost& cost,
                                             const std::vector<Point>& targets,
                                             const ActiveSet& boundary,
                                             const FrozenHalo& halo);

// Shift vector pinned to a spanning tree of the adjacency graph: the anchor
// (highest-degree node, ties to the lowest id) gets zero; every other value
// is propagated over one edge from the known vertex with the most unknown
// neighbors.  Throws NumericalError when the graph is disconnected.
struct ShiftSet {
  std::int32_t anchor = 0;
  std::vector<double> value;        // one per target
  std::vector<double> error_bound;  // accumulated along the tree path
  int edges_used = 0;               // tree edges consumed (n - 1)
};

ShiftSet solve_shifts(int targets, const std::vector<AdjacencyEdge>& edges);

// Region of a query point under the shifted cost: argmax_i value[i] -
// c(x, y_i), ties to the lower id.
std::int32_t partition_label(const GroundCost& cost,
                             const std::vector<Point>& targets,
                             const std::vector<double>& shift_values,
                             const double* x, int dim);

}  // namespace bmot

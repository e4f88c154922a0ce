#include "bmot/shifts.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace bmot {

std::vector<AdjacencyEdge> collect_adjacency(const GridGeometry& g,
                                             const GroundCost& cost,
                                             const std::vector<Point>& targets,
                                             const ActiveSet& boundary,
                                             const FrozenHalo& halo) {
  const int dim = g.dim;
  std::map<std::pair<std::int32_t, std::int32_t>, AdjacencyEdge> best;
  NeighborRef refs[80];
  for (std::size_t a = 0; a < boundary.size(); ++a) {
    std::int32_t la = boundary.label[a];
    if (la < 0) continue;
    int count = collect_neighbors(g, halo, boundary, a, refs);
    for (int k = 0; k < count; ++k) {
      if (refs[k].kind != NeighborKind::kActive) continue;
      std::size_t b = static_cast<std::size_t>(refs[k].active_pos);
      if (b <= a) continue;  // each unordered box pair once
      std::int32_t lb = boundary.label[b];
      if (lb < 0 || lb == la) continue;

      std::size_t lo_box = a, hi_box = b;
      std::int32_t i = la, j = lb;
      if (i > j) {
        std::swap(i, j);
        std::swap(lo_box, hi_box);
      }
      Point ci = box_center(g, boundary.level, boundary.keys[lo_box]);
      Point cj = box_center(g, boundary.level, boundary.keys[hi_box]);
      double pair_cost = cost(ci.data(), cj.data(), dim);

      auto it = best.find({i, j});
      if (it != best.end() && it->second.pair_cost <= pair_cost) continue;
      AdjacencyEdge e;
      e.i = i;
      e.j = j;
      e.pair_cost = pair_cost;
      e.box_i = boundary.keys[lo_box];
      e.box_j = boundary.keys[hi_box];
      Point mid{};
      for (int ax = 0; ax < dim; ++ax) mid[ax] = 0.5 * (ci[ax] + cj[ax]);
      e.estimate =
          cost.pair_difference(mid.data(), targets[i].data(),
                               targets[j].data(), dim);
      e.error_bound = cost.box_diameter_bound(2.0 * g.width(boundary.level),
                                              dim);
      best[{i, j}] = e;
    }
  }
  std::vector<AdjacencyEdge> edges;
  edges.reserve(best.size());
  for (const auto& [key, e] : best) edges.push_back(e);
  return edges;
}

ShiftSet solve_shifts(int targets, const std::vector<AdjacencyEdge>& edges) {
  if (targets < 1) throw ConfigError("shift solve needs at least one target");
  ShiftSet out;
  out.value.assign(targets, 0.0);
  out.error_bound.assign(targets, 0.0);
  if (targets == 1) return out;

  std::vector<std::vector<std::size_t>> incident(targets);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].i].push_back(e);
    incident[edges[e].j].push_back(e);
  }

  int anchor = 0;
  std::size_t best_degree = incident[0].size();
  for (int v = 1; v < targets; ++v)
    if (incident[v].size() > best_degree) {
      best_degree = incident[v].size();
      anchor = v;
    }
  out.anchor = anchor;

  std::vector<bool> known(targets, false);
  known[anchor] = true;
  int remaining = targets - 1;
  auto unknown_neighbors = [&](int v) {
    int c = 0;
    for (std::size_t e : incident[v]) {
      int other = edges[e].i == v ? edges[e].j : edges[e].i;
      if (!known[other]) ++c;
    }
    return c;
  };

  while (remaining > 0) {
    int pivot = -1, pivot_unknown = 0;
    for (int v = 0; v < targets; ++v) {
      if (!known[v]) continue;
      int u = unknown_neighbors(v);
      if (u > pivot_unknown) {
        pivot_unknown = u;
        pivot = v;
      }
    }
    if (pivot < 0) {
      std::ostringstream msg;
      msg << "adjacency graph is disconnected: targets";
      for (int v = 0; v < targets; ++v)
        if (!known[v]) msg << ' ' << v;
      msg << " are unreachable from the anchor";
      throw NumericalError(msg.str());
    }
    for (std::size_t e : incident[pivot]) {
      const AdjacencyEdge& edge = edges[e];
      int other = edge.i == pivot ? edge.j : edge.i;
      if (known[other]) continue;
      // estimate ~ a_i - a_j, so extend accordingly.
      if (edge.i == pivot)
        out.value[other] = out.value[pivot] - edge.estimate;
      else
        out.value[other] = out.value[pivot] + edge.estimate;
      out.error_bound[other] = out.error_bound[pivot] + edge.error_bound;
      known[other] = true;
      ++out.edges_used;
      --remaining;
    }
  }
  return out;
}

std::int32_t partition_label(const GroundCost& cost,
                             const std::vector<Point>& targets,
                             const std::vector<double>& shift_values,
                             const double* x, int dim) {
  std::int32_t best = 0;
  double best_score = shift_values[0] - cost(x, targets[0].data(), dim);
  for (std::size_t i = 1; i < targets.size(); ++i) {
    double score = shift_values[i] - cost(x, targets[i].data(), dim);
    if (score > best_score) {
      best_score = score;
      best = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

}  // namespace bmot

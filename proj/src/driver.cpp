#include "bmot/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace bmot {

namespace {

// Heuristic bound on the cost of every possible misassignment: each box
// pays its mass times the worst label swap against any differing neighbor
// label, probed at the box corners and center.
double worst_case_running_error(const GridGeometry& g, const GroundCost& cost,
                                const std::vector<Point>& targets,
                                const ActiveSet& active,
                                const FrozenHalo& halo, int threads) {
  const int dim = g.dim;
  std::vector<double> per_box(active.size(), 0.0);
  parallel_for(active.size(), threads, [&](std::size_t begin,
                                           std::size_t end) {
    NeighborRef refs[80];
    for (std::size_t i = begin; i < end; ++i) {
      std::int32_t own = active.label[i];
      if (own < 0) continue;
      Rect box = box_rect(g, active.level, active.keys[i]);
      int count = collect_neighbors(g, halo, active, i, refs);
      double worst = 0.0;
      std::int32_t seen[80];
      int seen_count = 0;
      for (int k = 0; k < count; ++k) {
        std::int32_t other = -1;
        if (refs[k].kind == NeighborKind::kActive)
          other = active.label[refs[k].active_pos];
        else if (refs[k].kind == NeighborKind::kFrozen)
          other = refs[k].frozen_label;
        if (other < 0 || other == own) continue;
        bool dup = false;
        for (int s = 0; s < seen_count; ++s)
          if (seen[s] == other) dup = true;
        if (dup) continue;
        seen[seen_count++] = other;

        double swap = 0.0;
        const int corners = 1 << dim;
        for (int c = 0; c <= corners; ++c) {
          Point x{};
          if (c == corners) {
            for (int a = 0; a < dim; ++a)
              x[a] = 0.5 * (box.lo[a] + box.hi[a]);
          } else {
            for (int a = 0; a < dim; ++a)
              x[a] = ((c >> (dim - 1 - a)) & 1) ? box.hi[a] : box.lo[a];
          }
          swap = std::max(swap, cost.pair_difference(x.data(),
                                                     targets[own].data(),
                                                     targets[other].data(),
                                                     dim));
        }
        worst = std::max(worst, swap);
      }
      per_box[i] = active.mass[i] * worst;
    }
  });
  double total = 0.0;
  for (double v : per_box) total += v;
  return total;
}

}  // namespace

RunResult run_boundary_method(const RunConfig& config) {
  const int threads = resolve_threads(config.threads);
  const int n = static_cast<int>(config.targets.size());

  RunResult result;
  result.geometry =
      GridGeometry{config.dim, config.side, config.initial_exponent};
  const GridGeometry& g = result.geometry;
  const int final_level = g.level_for_exponent(config.target_exponent);
  result.cost_accumulation =
      cost_integration_available(config.cost, config.density);

  ActiveSet active = initial_grid(g, config.density, threads);
  if (active.size() == 0)
    throw NumericalError("the initial grid carries no mass");
  FrozenHalo halo;
  std::vector<double> residual = config.weights;
  std::vector<double> prices(n, 0.0);
  double interior_cost = 0.0;

  for (int level = 1; level <= final_level; ++level) {
    const auto tick = std::chrono::steady_clock::now();
    const double width = g.width(level);
    mark_edges(g, halo, active, threads);

    // Costs are evaluated at box centers; at the final level an optional
    // granularity snaps them to multiples of the box cost diameter.
    double snap_resolution = 0.0;
    if (config.assignment_granularity > 0 && level == final_level)
      snap_resolution = config.assignment_granularity *
                        config.cost.box_diameter_bound(width, g.dim);
    TransportProblem problem;
    problem.sources = static_cast<int>(active.size());
    problem.sinks = n;
    problem.mass = active.mass;
    problem.capacity = residual;
    for (double& c : problem.capacity) c = std::max(c, 1e-18);
    problem.cost.resize(active.size() * static_cast<std::size_t>(n));
    parallel_for(active.size(), threads, [&](std::size_t begin,
                                             std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        Point center = box_center(g, level, active.keys[s]);
        for (int t = 0; t < n; ++t)
          problem.cost[s * n + t] = snap_cost(
              config.cost(center.data(), config.targets[t].data(), g.dim),
              snap_resolution);
      }
    });

    AuctionOptions options;
    options.threads = threads;
    if (level > 1) options.warm_prices = &prices;
    Assignment assignment = solve_transport(problem, options);
    prices = assignment.prices;
    for (std::size_t s = 0; s < active.size(); ++s)
      active.label[s] = assignment.destination(static_cast<int>(s));

    LevelStats stats;
    stats.level = level;
    stats.width = width;
    stats.active_boxes = static_cast<std::int64_t>(active.size());
    stats.auction_rounds = assignment.rounds;
    stats.epsilon_final = assignment.epsilon_final;
    stats.worst_case_error = worst_case_running_error(
        g, config.cost, config.targets, active, halo, threads);

    // Discard pass, decided on a snapshot of labels and splits: a box is
    // interior when it, and every neighbor, are whole and agree on the
    // label.  Edge boxes always stay.
    std::vector<char> split(active.size()), discard(active.size());
    for (std::size_t s = 0; s < active.size(); ++s)
      split[s] = assignment.split(static_cast<int>(s), active.mass[s]);
    parallel_for(active.size(), threads, [&](std::size_t begin,
                                             std::size_t end) {
      NeighborRef refs[80];
      for (std::size_t i = begin; i < end; ++i) {
        discard[i] = 0;
        if (active.flags[i] & kBoxEdge) continue;
        if (split[i]) continue;
        std::int32_t own = active.label[i];
        int count = collect_neighbors(g, halo, active, i, refs);
        bool interior = true;
        for (int k = 0; k < count && interior; ++k) {
          if (refs[k].kind == NeighborKind::kActive) {
            std::size_t p = static_cast<std::size_t>(refs[k].active_pos);
            if (active.label[p] != own || split[p]) interior = false;
          } else if (refs[k].kind == NeighborKind::kFrozen) {
            if (refs[k].frozen_label != own) interior = false;
          } else {
            interior = false;  // outside or zero: defensive, edge covers it
          }
        }
        discard[i] = interior ? 1 : 0;
      }
    });

    stats.edge_boxes = 0;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (active.flags[i] & kBoxEdge) ++stats.edge_boxes;

    ActiveSet retained;
    retained.level = active.level;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (discard[i]) {
        std::int32_t own = active.label[i];
        halo.add(level, active.keys[i], own);
        if (result.cost_accumulation)
          interior_cost += box_cost_mass_integral(
              config.cost, config.density,
              box_rect(g, level, active.keys[i]), config.targets[own]);
        residual[own] -= active.mass[i];
        ++stats.discarded_boxes;
      } else {
        retained.keys.push_back(active.keys[i]);
        retained.mass.push_back(active.mass[i]);
        retained.label.push_back(active.label[i]);
        retained.flags.push_back(active.flags[i]);
        stats.boundary_mass += active.mass[i];
      }
    }
    halo.finish_level(level);
    active = std::move(retained);
    stats.boundary_boxes = static_cast<std::int64_t>(active.size());
    stats.interior_cost = interior_cost;
    stats.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - tick)
                        .count();
    result.levels.push_back(stats);

    if (level < final_level) active = refine(g, config.density, active, threads);
  }

  result.boundary = std::move(active);
  result.residual_weights = residual;
  result.adjacency = collect_adjacency(g, config.cost, config.targets,
                                       result.boundary, halo);
  result.shifts = solve_shifts(n, result.adjacency);
  result.wasserstein = finalize_wasserstein(
      g, config.density, config.cost, config.targets, result.boundary, halo,
      interior_cost, threads);
  result.halo = std::move(halo);
  return result;
}

}  // namespace bmot

#pragma once

#include <cstdint>
#include <vector>

#include "bmot/auction.hpp"
#include "bmot/config.hpp"
#include "bmot/grid.hpp"
#include "bmot/shifts.hpp"
#include "bmot/wasserstein.hpp"

namespace bmot {

// Per-level progress of the refinement loop.
struct LevelStats {
  int level = 0;
  double width = 0.0;
  std::int64_t active_boxes = 0;     // boxes entering the solve
  std::int64_t edge_boxes = 0;       // flagged as edge (never discarded)
  std::int64_t discarded_boxes = 0;  // interiors frozen at this level
  std::int64_t boundary_boxes = 0;   // retained after the discard pass
  double boundary_mass = 0.0;        // mass retained after the discard pass
  double interior_cost = 0.0;        // running discarded-interior cost
  double worst_case_error = 0.0;     // heuristic misassignment bound
  std::int64_t auction_rounds = 0;
  double epsilon_final = 0.0;
  double wall_ms = 0.0;  // diagnostic only; never serialized
};

struct RunResult {
  GridGeometry geometry;
  std::vector<LevelStats> levels;
  ActiveSet boundary;  // final retained boxes with labels
  FrozenHalo halo;
  std::vector<double> residual_weights;  // capacity left per target
  std::vector<AdjacencyEdge> adjacency;
  ShiftSet shifts;
  WassersteinReport wasserstein;
  bool cost_accumulation = false;  // closed-form interior cost available
};

// Runs the full pipeline: initial grid, per-level transport solves with
// warm-started prices, interior discards, refinement to the target width,
// then shift extraction and the Wasserstein finalization.
RunResult run_boundary_method(const RunConfig& config);

}  // namespace bmot

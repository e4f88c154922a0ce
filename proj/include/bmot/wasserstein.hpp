#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmot/auction.hpp"
#include "bmot/grid.hpp"
#include "bmot/ground_cost.hpp"
#include "bmot/measure.hpp"

namespace bmot {

// Analytic Lebesgue integral of c(x, y) over an axis-aligned box (unit
// density).  Requires cost.closed_form_integrable(box.dim): every term is
// either a power sum (q == p) or the planar Euclidean distance.
double box_cost_integral(const GroundCost& cost, const Rect& box,
                         const Point& y);

// Integral of c(x, y) against the normalized density restricted to `box`.
// Needs a piecewise-uniform density on top of the closed-form cost.
double box_cost_mass_integral(const GroundCost& cost, const Density& density,
                              const Rect& box, const Point& y);

bool cost_integration_available(const GroundCost& cost,
                                const Density& density);

struct WassersteinReport {
  bool available = false;
  double value = 0.0;          // total transport cost estimate
  double error_bound = 0.0;    // certified bound on |value - exact|
  double interior_cost = 0.0;  // exact share from discarded interior boxes
  double boundary_cost = 0.0;  // estimated share from the final boundary
  double boundary_mass = 0.0;  // mass still sitting on boundary boxes
};

// Adds the final boundary boxes to the accumulated interior cost.  Each
// box's uncertainty is taken over the labels seen on the box and its
// neighbors; the certified bound is the sum of those per-box gaps.
WassersteinReport finalize_wasserstein(const GridGeometry& g,
                                       const Density& density,
                                       const GroundCost& cost,
                                       const std::vector<Point>& targets,
                                       const ActiveSet& boundary,
                                       const FrozenHalo& halo,
                                       double interior_cost, int threads);

// Closed-form values of named benchmark problems, usable as ground truth in
// tests and reports.  Known names: "nwse", "grid4x4".
std::optional<double> exact_reference_value(const std::string& name);

}  // namespace bmot

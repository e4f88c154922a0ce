#pragma once

#include <functional>
#include <vector>

#include "bmot/common.hpp"

namespace bmot {

// Fully dense description of a balanced transport problem between point
// masses.  Row-major layout: cost[s * sinks + t].
struct DenseTransportInstance {
  int sources = 0;
  int sinks = 0;
  std::vector<double> cost;
  std::vector<double> mass;      // per source, positive
  std::vector<double> capacity;  // per sink, positive; totals must balance
};

struct ExactPlan {
  std::vector<double> flow;  // row-major, same layout as cost
  double cost = 0.0;

  double marginal_error(const DenseTransportInstance&) const;
};

// Reference solver for problems small enough to audit by hand.  Refuses
// anything larger than 64 sources x 8 sinks so it can never masquerade as a
// production path.
ExactPlan brute_force_transport(const DenseTransportInstance&);

// Same exact algorithm without the tutorial-size cap, for dense-grid
// reference solves; refuses anything larger than 4096 sources x 16 sinks.
ExactPlan exact_transport_reference(const DenseTransportInstance&);

// Midpoint rule over a tensor grid with 2^depth cells per axis of the box.
double riemann_integral(const Rect& box, int depth,
                        const std::function<double(const double*)>& f);

}  // namespace bmot

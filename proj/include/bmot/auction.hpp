#pragma once

#include <cstdint>
#include <vector>

#include "bmot/common.hpp"

namespace bmot {

// Balanced transport problem fed to the auction: box masses against target
// capacities.  Costs are row-major (source-major), already snapped when an
// assignment granularity is in effect.
struct TransportProblem {
  int sources = 0;
  int sinks = 0;
  std::vector<double> cost;      // cost[s * sinks + t]
  std::vector<double> mass;      // per source, positive
  std::vector<double> capacity;  // per sink, positive; totals balance
};

// One unit of held flow: `mass` of some source assigned to `sink`.
struct Share {
  std::int32_t sink = -1;
  double mass = 0.0;
};

// Output of the auction: a CSR table of shares per source plus the final
// sink prices (reused to warm-start the next refinement level).
struct Assignment {
  std::vector<std::int32_t> first;  // size sources + 1
  std::vector<Share> shares;        // sink-ascending within each source
  std::vector<double> prices;       // per sink
  double epsilon_final = 0.0;
  std::int64_t rounds = 0;

  // Sink holding the largest piece of the source (ties to the lower sink
  // id); the label a box carries into the discard decision.
  std::int32_t destination(int source) const;

  // True when the source mass is split across sinks in more than a token
  // way (secondary shares above 1e-9 of the source mass).
  bool split(int source, double source_mass) const;

  double total_cost(const TransportProblem&) const;
};

// Epsilon-scaling schedule.  eps starts at cost_range / initial_divisor and
// shrinks by `factor` per phase until it passes cost_range * minimum_scale.
struct EpsSchedule {
  double initial_divisor = 8.0;
  double factor = 4.0;
  double minimum_scale = 1e-9;
};

struct AuctionOptions {
  EpsSchedule schedule;
  int threads = 1;
  std::int64_t max_rounds = 1'000'000;
  const std::vector<double>* warm_prices = nullptr;
};

// Raised when the round budget runs out; carries the best assignment seen so
// the caller can report diagnostics.
class AuctionStallError : public NumericalError {
 public:
  AuctionStallError(const std::string& what, Assignment partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const Assignment& partial() const { return partial_; }

 private:
  Assignment partial_;
};

// Price-raising auction with mass splitting.  Deterministic for any thread
// count: bids are computed into per-source slots and all price/queue updates
// run serially in id order.
Assignment solve_transport(const TransportProblem& problem,
                           const AuctionOptions& options = {});

// Rounds c to the nearest multiple of `resolution` (no-op when it is 0).
double snap_cost(double c, double resolution);

// Complementary slackness audit: every held share must be within eps (plus
// round-off slack) of the cheapest price-adjusted sink for its source.
struct SlacknessReport {
  bool ok = true;
  double worst_violation = 0.0;
};
SlacknessReport check_eps_slackness(const TransportProblem& problem,
                                    const Assignment& assignment, double eps);

}  // namespace bmot

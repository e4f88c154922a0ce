#include "bmot/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bmot {

namespace {

struct HeldShare {
  std::int32_t source = -1;
  double mass = 0.0;
  double price = 0.0;  // price at which the share was acquired
};

struct Bid {
  std::int32_t sink = -1;
  double price = 0.0;
};

struct Candidate {
  double price = 0.0;
  std::int32_t source = -1;
  bool fresh = false;  // new bid (true) vs already-held share (false)
  double mass = 0.0;
};

void validate(const TransportProblem& p) {
  if (p.sources <= 0 || p.sinks <= 0)
    throw ConfigError("transport problem needs sources and sinks");
  if (p.cost.size() != static_cast<std::size_t>(p.sources) * p.sinks ||
      p.mass.size() != static_cast<std::size_t>(p.sources) ||
      p.capacity.size() != static_cast<std::size_t>(p.sinks))
    throw ConfigError("transport problem has inconsistent array sizes");
  double total_mass = 0.0, total_cap = 0.0;
  for (double m : p.mass) {
    if (!(m > 0) || !std::isfinite(m))
      throw ConfigError("source masses must be positive and finite");
    total_mass += m;
  }
  for (double c : p.capacity) {
    if (!(c > 0) || !std::isfinite(c))
      throw ConfigError("sink capacities must be positive and finite");
    total_cap += c;
  }
  for (double c : p.cost)
    if (!std::isfinite(c)) throw ConfigError("costs must be finite");
  if (std::abs(total_mass - total_cap) >
      1e-9 * std::max(total_mass, total_cap))
    throw ConfigError("transport problem is not balanced");
}

class AuctionSolver {
 public:
  AuctionSolver(const TransportProblem& p, const AuctionOptions& opt)
      : p_(p), opt_(opt) {}

  Assignment run() {
    validate(p_);
    m_ = p_.sources;
    n_ = p_.sinks;
    total_mass_ = 0.0;
    for (double m : p_.mass) total_mass_ += m;
    residual_tol_ = 1e-13 * total_mass_;

    double cmin = p_.cost[0], cmax = p_.cost[0];
    for (double c : p_.cost) {
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    range_ = cmax - cmin > 0 ? cmax - cmin : 1.0;

    if (opt_.warm_prices) {
      if (opt_.warm_prices->size() != static_cast<std::size_t>(n_))
        throw ConfigError("warm price vector has the wrong length");
      prices_ = *opt_.warm_prices;
    } else {
      prices_.assign(n_, 0.0);
    }
    held_.assign(n_, {});
    unassigned_ = p_.mass;
    bids_.assign(m_, Bid{});

    const double eps_min = opt_.schedule.minimum_scale * range_;
    double eps = std::max(range_ / opt_.schedule.initial_divisor, eps_min);
    while (true) {
      evict_slackness_violators(eps);
      run_phase(eps);
      if (eps <= eps_min) {
        // Late price rises can strand shares locked in earlier phases above
        // the final tolerance; re-auction until a pass leaves none behind.
        if (evict_slackness_violators(eps) == 0) break;
      } else {
        eps = std::max(eps / opt_.schedule.factor, eps_min);
      }
    }
    force_assign_residue();
    return build_assignment(eps);
  }

 private:
  double cost(int s, int t) const {
    return p_.cost[static_cast<std::size_t>(s) * n_ + t];
  }

  // Smallest and second-smallest price-adjusted cost for a source; ties go
  // to the lower sink id.
  void best_two(int s, int* b1, double* w1, double* w2) const {
    *b1 = 0;
    *w1 = cost(s, 0) + prices_[0];
    *w2 = std::numeric_limits<double>::infinity();
    for (int t = 1; t < n_; ++t) {
      double w = cost(s, t) + prices_[t];
      if (w < *w1) {
        *w2 = *w1;
        *w1 = w;
        *b1 = t;
      } else if (w < *w2) {
        *w2 = w;
      }
    }
    if (n_ == 1) *w2 = *w1;
  }

  std::size_t evict_slackness_violators(double eps) {
    std::size_t evicted = 0;
    for (int t = 0; t < n_; ++t) {
      auto& lot = held_[t];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < lot.size(); ++i) {
        int b1;
        double w1, w2;
        best_two(lot[i].source, &b1, &w1, &w2);
        if (cost(lot[i].source, t) + prices_[t] > w1 + eps) {
          unassigned_[lot[i].source] += lot[i].mass;
          ++evicted;
        } else {
          lot[keep++] = lot[i];
        }
      }
      lot.resize(keep);
    }
    return evicted;
  }

  void run_phase(double eps) {
    while (true) {
      double pending = 0.0;
      for (double u : unassigned_) pending += u;
      if (pending <= residual_tol_) return;
      if (rounds_ >= opt_.max_rounds) {
        force_assign_residue();
        std::ostringstream msg;
        msg << "auction stalled after " << rounds_ << " rounds with "
            << pending << " of " << total_mass_ << " mass pending";
        throw AuctionStallError(msg.str(), build_assignment(eps));
      }
      ++rounds_;

      // Bid phase: each pending source picks its cheapest sink and offers a
      // price that stays eps-competitive against the runner-up.  Slots are
      // per source, so any thread partition yields the same bids.
      parallel_for(static_cast<std::size_t>(m_), opt_.threads,
                   [&](std::size_t begin, std::size_t end) {
                     for (std::size_t s = begin; s < end; ++s) {
                       if (unassigned_[s] <= 0) {
                         bids_[s].sink = -1;
                         continue;
                       }
                       int b1;
                       double w1, w2;
                       best_two(static_cast<int>(s), &b1, &w1, &w2);
                       bids_[s].sink = b1;
                       bids_[s].price = prices_[b1] + (w2 - w1) + eps;
                     }
                   });

      // Collect phase, serial in sink order: merge standing shares with new
      // bids, keep the highest-priced prefix that fits the capacity, return
      // the rest to the pending pool.
      for (int t = 0; t < n_; ++t) {
        bool contested = false;
        for (int s = 0; s < m_ && !contested; ++s)
          if (bids_[s].sink == t) contested = true;
        if (!contested) continue;

        candidates_.clear();
        for (const HeldShare& h : held_[t])
          candidates_.push_back({h.price, h.source, false, h.mass});
        for (int s = 0; s < m_; ++s)
          if (bids_[s].sink == t)
            candidates_.push_back({bids_[s].price, s, true, unassigned_[s]});
        std::sort(candidates_.begin(), candidates_.end(),
                  [](const Candidate& a, const Candidate& b) {
                    if (a.price != b.price) return a.price > b.price;
                    if (a.source != b.source) return a.source < b.source;
                    return a.fresh < b.fresh;
                  });

        auto& lot = held_[t];
        lot.clear();
        double room = p_.capacity[t];
        double marginal_price = prices_[t];
        bool filled = false;
        for (const Candidate& c : candidates_) {
          if (room <= 0) {
            if (!c.fresh) unassigned_[c.source] += c.mass;
            continue;
          }
          double taken = std::min(c.mass, room);
          room -= taken;
          if (c.fresh) unassigned_[c.source] -= taken;
          else if (taken < c.mass)
            unassigned_[c.source] += c.mass - taken;
          lot.push_back({c.source, taken, c.price});
          if (room <= 0) {
            filled = true;
            marginal_price = c.price;
          }
        }
        if (filled) prices_[t] = marginal_price;
        merge_same_source(lot);
      }
    }
  }

  // Collapses multiple records of one source at one sink into a single share
  // priced at the highest of the merged records.  The highest price wins
  // because a fresh bid from a source that already holds the sink's marginal
  // mass is a self-raise: keeping the old lower price would let the source
  // displace slivers of itself forever without the marginal ever moving.
  static void merge_same_source(std::vector<HeldShare>& lot) {
    std::sort(lot.begin(), lot.end(),
              [](const HeldShare& a, const HeldShare& b) {
                return a.source < b.source;
              });
    std::size_t out = 0;
    for (std::size_t i = 0; i < lot.size();) {
      HeldShare merged = lot[i];
      std::size_t j = i + 1;
      while (j < lot.size() && lot[j].source == merged.source) {
        merged.mass += lot[j].mass;
        merged.price = std::max(merged.price, lot[j].price);
        ++j;
      }
      lot[out++] = merged;
      i = j;
    }
    lot.resize(out);
  }

  void force_assign_residue() {
    for (int s = 0; s < m_; ++s) {
      if (unassigned_[s] <= 0) continue;
      int b1;
      double w1, w2;
      best_two(s, &b1, &w1, &w2);
      held_[b1].push_back({s, unassigned_[s], prices_[b1]});
      unassigned_[s] = 0.0;
      merge_same_source(held_[b1]);
    }
  }

  Assignment build_assignment(double eps) const {
    std::vector<std::vector<Share>> per_source(m_);
    for (int t = 0; t < n_; ++t)
      for (const HeldShare& h : held_[t])
        per_source[h.source].push_back({t, h.mass});
    Assignment out;
    out.first.assign(m_ + 1, 0);
    for (int s = 0; s < m_; ++s)
      out.first[s + 1] =
          out.first[s] + static_cast<std::int32_t>(per_source[s].size());
    out.shares.reserve(out.first[m_]);
    for (int s = 0; s < m_; ++s)
      for (const Share& sh : per_source[s]) out.shares.push_back(sh);
    out.prices = prices_;
    out.epsilon_final = eps;
    out.rounds = rounds_;
    return out;
  }

  const TransportProblem& p_;
  const AuctionOptions& opt_;
  int m_ = 0, n_ = 0;
  double total_mass_ = 0.0;
  double residual_tol_ = 0.0;
  double range_ = 1.0;
  std::int64_t rounds_ = 0;
  std::vector<double> prices_;
  std::vector<double> unassigned_;
  std::vector<Bid> bids_;
  std::vector<std::vector<HeldShare>> held_;
  std::vector<Candidate> candidates_;
};

}  // namespace

std::int32_t Assignment::destination(int source) const {
  std::int32_t best = -1;
  double best_mass = -1.0;
  for (std::int32_t i = first[source]; i < first[source + 1]; ++i) {
    if (shares[i].mass > best_mass) {
      best_mass = shares[i].mass;
      best = shares[i].sink;
    }
  }
  return best;
}

bool Assignment::split(int source, double source_mass) const {
  const double threshold = 1e-9 * source_mass;
  int significant = 0;
  for (std::int32_t i = first[source]; i < first[source + 1]; ++i)
    if (shares[i].mass > threshold) ++significant;
  return significant > 1;
}

double Assignment::total_cost(const TransportProblem& p) const {
  double c = 0.0;
  for (int s = 0; s < p.sources; ++s)
    for (std::int32_t i = first[s]; i < first[s + 1]; ++i)
      c += shares[i].mass *
           p.cost[static_cast<std::size_t>(s) * p.sinks + shares[i].sink];
  return c;
}

Assignment solve_transport(const TransportProblem& problem,
                           const AuctionOptions& options) {
  return AuctionSolver(problem, options).run();
}

double snap_cost(double c, double resolution) {
  if (resolution <= 0) return c;
  return std::round(c / resolution) * resolution;
}

SlacknessReport check_eps_slackness(const TransportProblem& problem,
                                    const Assignment& assignment, double eps) {
  SlacknessReport rep;
  double range = 0.0;
  for (double c : problem.cost) range = std::max(range, std::abs(c));
  const double tol = 1e-12 * std::max(range, 1.0);
  for (int s = 0; s < problem.sources; ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < problem.sinks; ++t)
      best = std::min(best, problem.cost[static_cast<std::size_t>(s) *
                                             problem.sinks +
                                         t] +
                                assignment.prices[t]);
    for (std::int32_t i = assignment.first[s]; i < assignment.first[s + 1];
         ++i) {
      if (assignment.shares[i].mass <= 1e-12 * problem.mass[s]) continue;
      double held = problem.cost[static_cast<std::size_t>(s) * problem.sinks +
                                 assignment.shares[i].sink] +
                    assignment.prices[assignment.shares[i].sink];
      double violation = held - best - eps;
      if (violation > rep.worst_violation) rep.worst_violation = violation;
      if (violation > tol) rep.ok = false;
    }
  }
  return rep;
}

}  // namespace bmot

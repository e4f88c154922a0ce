#include "bmot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

namespace bmot {

double ExactPlan::marginal_error(const DenseTransportInstance& in) const {
  double worst = 0.0;
  for (int s = 0; s < in.sources; ++s) {
    double row = 0.0;
    for (int t = 0; t < in.sinks; ++t) row += flow[s * in.sinks + t];
    worst = std::max(worst, std::abs(row - in.mass[s]));
  }
  for (int t = 0; t < in.sinks; ++t) {
    double col = 0.0;
    for (int s = 0; s < in.sources; ++s) col += flow[s * in.sinks + t];
    worst = std::max(worst, std::abs(col - in.capacity[t]));
  }
  return worst;
}

namespace {

// Transportation simplex with Bland's anti-cycling rule.  The basis is a
// spanning tree on the bipartite node set {sources} + {sinks}; duals are
// propagated over that tree, and each pivot shifts flow around the unique
// cycle closed by the entering cell.
class TransportSimplex {
 public:
  explicit TransportSimplex(const DenseTransportInstance& in) : in_(in) {
    m_ = in.sources;
    n_ = in.sinks;
    flow_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
    in_basis_.assign(flow_.size(), false);
  }

  ExactPlan solve() {
    validate();
    northwest_start();
    double scale = 1.0;
    for (double c : in_.cost) scale = std::max(scale, std::abs(c));
    const double tol = 1e-12 * scale;
    const std::int64_t max_pivots =
        1024 + 64LL * static_cast<std::int64_t>(m_) * n_;
    for (std::int64_t pivot = 0;; ++pivot) {
      if (pivot > max_pivots)
        throw NumericalError("transport simplex exceeded its pivot budget");
      compute_duals();
      int enter = -1;
      for (int s = 0; s < m_ && enter < 0; ++s)
        for (int t = 0; t < n_; ++t) {
          std::size_t cell = index(s, t);
          if (in_basis_[cell]) continue;
          if (in_.cost[cell] - u_[s] - v_[t] < -tol) {
            enter = static_cast<int>(cell);
            break;  // lowest-index entering cell (Bland)
          }
        }
      if (enter < 0) break;
      pivot_on(enter / n_, enter % n_);
    }
    ExactPlan plan;
    plan.flow = flow_;
    plan.cost = 0.0;
    for (std::size_t i = 0; i < flow_.size(); ++i)
      plan.cost += flow_[i] * in_.cost[i];
    return plan;
  }

 private:
  std::size_t index(int s, int t) const {
    return static_cast<std::size_t>(s) * n_ + t;
  }

  void validate() const {
    if (m_ <= 0 || n_ <= 0)
      throw ConfigError("transport instance needs sources and sinks");
    if (in_.cost.size() != static_cast<std::size_t>(m_) * n_ ||
        in_.mass.size() != static_cast<std::size_t>(m_) ||
        in_.capacity.size() != static_cast<std::size_t>(n_))
      throw ConfigError("transport instance has inconsistent array sizes");
    double total_mass = 0.0, total_cap = 0.0;
    for (double x : in_.mass) {
      if (!(x > 0)) throw ConfigError("source masses must be positive");
      total_mass += x;
    }
    for (double x : in_.capacity) {
      if (!(x > 0)) throw ConfigError("sink capacities must be positive");
      total_cap += x;
    }
    if (std::abs(total_mass - total_cap) >
        1e-9 * std::max(total_mass, total_cap))
      throw ConfigError("transport instance is not balanced");
  }

  // Northwest-corner start: exactly m + n - 1 basic cells, degenerate zeros
  // included, because every step but the last advances one index.
  void northwest_start() {
    std::vector<double> rm = in_.mass;
    std::vector<double> rc = in_.capacity;
    basis_.clear();
    int s = 0, t = 0;
    while (true) {
      double moved = std::min(rm[s], rc[t]);
      flow_[index(s, t)] = moved;
      in_basis_[index(s, t)] = true;
      basis_.push_back({s, t});
      rm[s] -= moved;
      rc[t] -= moved;
      if (s == m_ - 1 && t == n_ - 1) break;
      if (t == n_ - 1)
        ++s;
      else if (s == m_ - 1)
        ++t;
      else if (rm[s] <= rc[t])
        ++s;
      else
        ++t;
    }
  }

  // Nodes: s in [0, m) and m + t for sinks.  Fills adj_ with basis indices.
  void build_adjacency() {
    adj_.assign(m_ + n_, {});
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      adj_[basis_[b].first].push_back(static_cast<int>(b));
      adj_[m_ + basis_[b].second].push_back(static_cast<int>(b));
    }
  }

  void compute_duals() {
    build_adjacency();
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<bool> seen(m_ + n_, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int reached = 1;
    while (!stack.empty()) {
      int node = stack.back();
      stack.pop_back();
      for (int b : adj_[node]) {
        int s = basis_[b].first;
        int t_node = m_ + basis_[b].second;
        int other = (node == s) ? t_node : s;
        if (seen[other]) continue;
        seen[other] = true;
        ++reached;
        if (other == t_node)
          v_[basis_[b].second] = in_.cost[index(s, basis_[b].second)] - u_[s];
        else
          u_[s] = in_.cost[index(s, basis_[b].second)] - v_[basis_[b].second];
        stack.push_back(other);
      }
    }
    if (reached != m_ + n_)
      throw NumericalError("transport basis lost connectivity");
  }

  void pivot_on(int enter_s, int enter_t) {
    build_adjacency();
    // Tree path from the entering cell's sink node back to its source node.
    std::vector<int> parent_edge(m_ + n_, -1);
    std::vector<int> parent_node(m_ + n_, -1);
    std::vector<bool> seen(m_ + n_, false);
    std::vector<int> stack{enter_s};
    seen[enter_s] = true;
    while (!stack.empty()) {
      int node = stack.back();
      stack.pop_back();
      if (node == m_ + enter_t) break;
      for (int b : adj_[node]) {
        int s = basis_[b].first;
        int t_node = m_ + basis_[b].second;
        int other = (node == s) ? t_node : s;
        if (seen[other]) continue;
        seen[other] = true;
        parent_edge[other] = b;
        parent_node[other] = node;
        stack.push_back(other);
      }
    }
    if (!seen[m_ + enter_t])
      throw NumericalError("transport basis lost connectivity");

    // Walking back from the sink node, path edges at even positions share a
    // column (then a row, alternating) with the entering cell, so they give
    // up the flow the entering cell gains.
    std::vector<int> cycle;
    for (int node = m_ + enter_t; node != enter_s; node = parent_node[node])
      cycle.push_back(parent_edge[node]);

    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cycle.size(); k += 2)
      theta = std::min(theta,
                       flow_[index(basis_[cycle[k]].first,
                                   basis_[cycle[k]].second)]);
    int leave = -1;
    std::size_t leave_cell = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      int b = cycle[k];
      std::size_t cell = index(basis_[b].first, basis_[b].second);
      if (flow_[cell] == theta && cell < leave_cell) {
        leave = b;
        leave_cell = cell;
      }
    }
    if (leave < 0)
      throw NumericalError("transport pivot found no leaving cell");

    flow_[index(enter_s, enter_t)] += theta;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      std::size_t cell = index(basis_[cycle[k]].first, basis_[cycle[k]].second);
      flow_[cell] += (k % 2 == 0) ? -theta : theta;
    }
    in_basis_[leave_cell] = false;
    flow_[leave_cell] = 0.0;
    basis_[leave] = {enter_s, enter_t};
    in_basis_[index(enter_s, enter_t)] = true;
  }

  const DenseTransportInstance& in_;
  int m_ = 0, n_ = 0;
  std::vector<double> flow_;
  std::vector<bool> in_basis_;
  std::vector<std::pair<int, int>> basis_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> u_, v_;
};

ExactPlan solve_capped(const DenseTransportInstance& in, int max_sources,
                       int max_sinks, const char* who) {
  if (in.sources > max_sources || in.sinks > max_sinks) {
    std::ostringstream msg;
    msg << who << " accepts at most " << max_sources << " sources and "
        << max_sinks << " sinks (got " << in.sources << " x " << in.sinks
        << ")";
    throw ConfigError(msg.str());
  }
  return TransportSimplex(in).solve();
}

}  // namespace

ExactPlan brute_force_transport(const DenseTransportInstance& in) {
  return solve_capped(in, 64, 8, "brute_force_transport");
}

ExactPlan exact_transport_reference(const DenseTransportInstance& in) {
  return solve_capped(in, 4096, 16, "exact_transport_reference");
}

double riemann_integral(const Rect& box, int depth,
                        const std::function<double(const double*)>& f) {
  if (box.dim < 1 || box.dim > kMaxDim)
    throw ConfigError("riemann_integral: box dimension out of range");
  if (depth < 0 || depth > 14)
    throw ConfigError("riemann_integral: depth out of range");
  const std::uint64_t cells = std::uint64_t{1} << depth;
  double step[kMaxDim] = {0, 0, 0, 0};
  double cell_volume = 1.0;
  for (int a = 0; a < box.dim; ++a) {
    step[a] = (box.hi[a] - box.lo[a]) / static_cast<double>(cells);
    cell_volume *= step[a];
  }
  std::uint64_t total = 1;
  for (int a = 0; a < box.dim; ++a) total *= cells;
  long double sum = 0.0L;
  Point x{};
  for (std::uint64_t linear = 0; linear < total; ++linear) {
    std::uint64_t rest = linear;
    for (int a = box.dim - 1; a >= 0; --a) {
      std::uint64_t idx = rest % cells;
      rest /= cells;
      x[a] = box.lo[a] + (static_cast<double>(idx) + 0.5) * step[a];
    }
    sum += f(x.data());
  }
  return static_cast<double>(sum) * cell_volume;
}

}  // namespace bmot

#include <cmath>
#include <random>

#include "bmot/oracle.hpp"
#include "doctest.h"

using bmot::DenseTransportInstance;
using bmot::ExactPlan;

namespace {

DenseTransportInstance make_instance(int m, int n, std::vector<double> cost,
                                     std::vector<double> mass,
                                     std::vector<double> cap) {
  DenseTransportInstance in;
  in.sources = m;
  in.sinks = n;
  in.cost = std::move(cost);
  in.mass = std::move(mass);
  in.capacity = std::move(cap);
  return in;
}

}  // namespace

TEST_CASE("2x2 with a free perfect matching") {
  auto in = make_instance(2, 2, {0, 1, 1, 0}, {0.5, 0.5}, {0.5, 0.5});
  ExactPlan plan = bmot::brute_force_transport(in);
  CHECK(plan.cost == doctest::Approx(0.0));
  CHECK(plan.marginal_error(in) <= 1e-12);
}

TEST_CASE("3x2 fixture has optimum 1.4") {
  // Vertex enumeration over the transport polytope gives 1.4: send 0.5 of
  // source 0 to sink 0, 0.3 of source 1 to sink 1, then split source 2 as
  // 0.1 + 0.1.
  auto in = make_instance(3, 2, {1, 2, 2, 1, 3, 3}, {0.5, 0.3, 0.2},
                          {0.6, 0.4});
  ExactPlan plan = bmot::brute_force_transport(in);
  CHECK(plan.cost == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(plan.marginal_error(in) <= 1e-12);
}

TEST_CASE("single sink collapses to a dot product") {
  auto in = make_instance(3, 1, {2, 3, 4}, {0.2, 0.3, 0.5}, {1.0});
  ExactPlan plan = bmot::brute_force_transport(in);
  CHECK(plan.cost == doctest::Approx(0.4 + 0.9 + 2.0));
}

TEST_CASE("size caps are enforced") {
  std::vector<double> cost(65 * 2, 1.0), mass(65, 1.0), cap{60.0, 5.0};
  auto big = make_instance(65, 2, cost, mass, cap);
  CHECK_THROWS_AS(bmot::brute_force_transport(big), bmot::ConfigError);
  CHECK_NOTHROW(bmot::exact_transport_reference(big));
}

TEST_CASE("imbalanced instances are rejected") {
  auto in = make_instance(2, 2, {0, 1, 1, 0}, {0.5, 0.5}, {0.5, 0.6});
  CHECK_THROWS_AS(bmot::brute_force_transport(in), bmot::ConfigError);
}

TEST_CASE("optimum lower-bounds random feasible plans") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int it = 0; it < 20; ++it) {
    int m = 2 + static_cast<int>(u(rng) * 10);
    int n = 2 + static_cast<int>(u(rng) * 5);
    std::vector<double> cost(m * n), mass(m), cap(n, 0.0);
    for (double& c : cost) c = u(rng);
    double total = 0;
    for (double& x : mass) {
      x = u(rng);
      total += x;
    }
    // Build a random feasible plan first, then derive the marginals from it
    // so the instance is balanced by construction.
    std::vector<double> plan(m * n, 0.0);
    for (int s = 0; s < m; ++s) {
      double left = mass[s];
      for (int t = 0; t < n; ++t) {
        double x = (t == n - 1) ? left : left * u(rng);
        plan[s * n + t] = x;
        left -= x;
      }
    }
    for (int t = 0; t < n; ++t)
      for (int s = 0; s < m; ++s) cap[t] += plan[s * n + t];
    for (double& c : cap) c = std::max(c, 1e-9);

    auto in = make_instance(m, n, cost, mass, cap);
    ExactPlan best = bmot::brute_force_transport(in);
    double random_cost = 0;
    for (int i = 0; i < m * n; ++i) random_cost += plan[i] * cost[i];
    CHECK(best.cost <= random_cost + 1e-9);
    CHECK(best.marginal_error(in) <= 1e-9);
  }
}

TEST_CASE("riemann integral: constants, polynomials, convergence") {
  bmot::Rect box;
  box.dim = 2;
  box.lo = {0.25, 0.5, 0, 0};
  box.hi = {0.5, 0.75, 0, 0};
  CHECK(bmot::riemann_integral(box, 3, [](const double*) { return 1.0; }) ==
        doctest::Approx(0.0625).epsilon(1e-14));

  bmot::Rect unit;
  unit.dim = 2;
  unit.lo = {0, 0, 0, 0};
  unit.hi = {1, 1, 0, 0};
  double xy = bmot::riemann_integral(
      unit, 10, [](const double* x) { return x[0] * x[1]; });
  CHECK(xy == doctest::Approx(0.25).epsilon(1e-6));

  // Euclidean distance to the center; the reference value is
  // (sqrt(2) + asinh(1)) / 6.
  auto dist = [](const double* x) {
    return std::hypot(x[0] - 0.5, x[1] - 0.5);
  };
  double d11 = bmot::riemann_integral(unit, 11, dist);
  CHECK(d11 == doctest::Approx(0.3825978582321063).epsilon(1e-4));
  // Convergence: error shrinks with depth.
  double exact = 0.3825978582321063;
  double prev = std::abs(bmot::riemann_integral(unit, 7, dist) - exact);
  for (int depth = 8; depth <= 10; ++depth) {
    double err = std::abs(bmot::riemann_integral(unit, depth, dist) - exact);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("riemann depth cap") {
  bmot::Rect unit;
  unit.dim = 2;
  unit.lo = {0, 0, 0, 0};
  unit.hi = {1, 1, 0, 0};
  CHECK_THROWS_AS(
      bmot::riemann_integral(unit, 15, [](const double*) { return 1.0; }),
      bmot::ConfigError);
}

#include <cmath>

#include "bmot/driver.hpp"
#include "bmot/summary.hpp"
#include "doctest.h"

namespace {

// Boxes of positive mass adjacent to the domain boundary are edge boxes and
// are always retained, so every final boundary set carries the outer ring in
// addition to the watershed band.
bool touches_domain_edge(const bmot::Rect& r, int dim, double side = 1.0) {
  for (int a = 0; a < dim; ++a)
    if (r.lo[a] <= 1e-12 || r.hi[a] >= side - 1e-12) return true;
  return false;
}

std::string two_point_config(int threads, int target_exponent = 6) {
  std::string text = R"({
    "version": 1,
    "dim": 2,
    "initial_exponent": 3,
    "target_exponent": )" + std::to_string(target_exponent) + R"(,
    "threads": )" + std::to_string(threads) + R"(,
    "targets": [
      {"point": [0.25, 0.5], "weight": 0.5},
      {"point": [0.75, 0.5], "weight": 0.5}
    ]
  })";
  return text;
}

}  // namespace

TEST_CASE("two-target split refines to a thin vertical band") {
  auto cfg = bmot::parse_config_text(two_point_config(1));
  auto result = bmot::run_boundary_method(cfg);

  REQUIRE(result.levels.size() == 4);  // exponents 3,4,5,6
  CHECK(result.levels.back().width == doctest::Approx(std::ldexp(1.0, -6)));
  CHECK(result.boundary.level == 4);

  // The watershed is the x = 1/2 line: every final box either touches it or
  // belongs to the retained domain-edge ring.
  double w = result.geometry.width(result.boundary.level);
  std::size_t band = 0;
  for (std::size_t i = 0; i < result.boundary.size(); ++i) {
    bmot::Rect r =
        bmot::box_rect(result.geometry, result.boundary.level,
                       result.boundary.keys[i]);
    bool straddles = r.lo[0] <= 0.5 + 1e-12 && r.hi[0] >= 0.5 - 1e-12;
    CHECK((straddles || touches_domain_edge(r, 2)));
    if (straddles) ++band;
    CHECK(r.hi[0] - r.lo[0] == doctest::Approx(w));
  }
  // Two full columns of 64 boxes hug the line (corners counted in the ring).
  CHECK(band >= 100);

  // Mass accounting: residual weights equal the boundary mass per label.
  std::vector<double> boundary_mass(2, 0.0);
  for (std::size_t i = 0; i < result.boundary.size(); ++i)
    boundary_mass[result.boundary.label[i]] += result.boundary.mass[i];
  for (int t = 0; t < 2; ++t)
    CHECK(result.residual_weights[t] ==
          doctest::Approx(boundary_mass[t]).epsilon(1e-9));

  // Shifts: symmetric configuration, so both shifts agree.
  REQUIRE(result.shifts.value.size() == 2);
  CHECK(result.shifts.value[0] == doctest::Approx(result.shifts.value[1])
                                      .epsilon(1e-9));
  CHECK(result.shifts.edges_used == 1);

  // Wasserstein: the exact value for this split is 2 * int_{[0,1/2]x[0,1]}
  // |x - (1/4, 1/2)| dx; the certified bound must cover the defect.
  REQUIRE(result.wasserstein.available);
  double exact = 0.2966167080344749;  // frozen closed-form value
  CHECK(std::abs(result.wasserstein.value - exact) <=
        result.wasserstein.error_bound);
  CHECK(result.wasserstein.error_bound < 1e-2);
}

TEST_CASE("level statistics are monotone and consistent") {
  auto cfg = bmot::parse_config_text(two_point_config(1));
  auto result = bmot::run_boundary_method(cfg);
  for (const auto& lvl : result.levels) {
    CHECK(lvl.active_boxes > 0);
    CHECK(lvl.boundary_boxes + lvl.discarded_boxes == lvl.active_boxes);
    CHECK(lvl.boundary_mass >= 0);
    CHECK(lvl.auction_rounds > 0);
  }
  // Refinement at most quadruples the retained boxes in 2D.
  for (std::size_t i = 1; i < result.levels.size(); ++i)
    CHECK(result.levels[i].active_boxes <=
          4 * result.levels[i - 1].boundary_boxes);
  // Boundary mass shrinks as the band thins (roughly halves per level).
  CHECK(result.levels.back().boundary_mass <
        result.levels.front().boundary_mass);
}

TEST_CASE("summaries are byte-identical across thread counts") {
  auto run = [](int threads) {
    auto cfg = bmot::parse_config_text(two_point_config(threads));
    auto result = bmot::run_boundary_method(cfg);
    return bmot::summary_to_json_text(cfg, result);
  };
  std::string one = run(1);
  CHECK(run(3) == one);
  CHECK(run(8) == one);
  // And across repeated runs with the same thread count.
  CHECK(run(3) == run(3));
}

TEST_CASE("asymmetric weights shift the watershed") {
  std::string text = R"({
    "version": 1,
    "dim": 2,
    "initial_exponent": 3,
    "target_exponent": 6,
    "targets": [
      {"point": [0.25, 0.5], "weight": 0.8},
      {"point": [0.75, 0.5], "weight": 0.2}
    ]
  })";
  auto cfg = bmot::parse_config_text(text);
  auto result = bmot::run_boundary_method(cfg);
  // Region 0 must absorb 0.8 of the mass, so the watershed sits right of
  // the midline; outside the domain-edge ring every boundary box lives in
  // x > 0.55.
  for (std::size_t i = 0; i < result.boundary.size(); ++i) {
    bmot::Rect r = bmot::box_rect(result.geometry, result.boundary.level,
                                  result.boundary.keys[i]);
    if (touches_domain_edge(r, 2)) continue;
    bmot::Point c = bmot::box_center(result.geometry, result.boundary.level,
                                     result.boundary.keys[i]);
    CHECK(c[0] > 0.55);
  }
  // The heavier region gets the (relatively) lower shifted cost:
  // a_0 - a_1 > 0 pulls boundary points toward label 0.
  CHECK(result.shifts.value[0] - result.shifts.value[1] > 0.0);
}

TEST_CASE("zero-density quadrant is never active") {
  std::string text = R"({
    "version": 1,
    "dim": 2,
    "initial_exponent": 3,
    "target_exponent": 5,
    "density": {"pieces": [
      {"lo": [0, 0], "hi": [1, 0.5]},
      {"lo": [0, 0.5], "hi": [0.5, 1]}
    ]},
    "targets": [
      {"point": [0.25, 0.25], "weight": 0.5},
      {"point": [0.75, 0.25], "weight": 0.5}
    ]
  })";
  auto cfg = bmot::parse_config_text(text);
  auto result = bmot::run_boundary_method(cfg);
  for (std::size_t i = 0; i < result.boundary.size(); ++i) {
    bmot::Point c = bmot::box_center(result.geometry, result.boundary.level,
                                     result.boundary.keys[i]);
    bool in_dead_quadrant = c[0] > 0.5 && c[1] > 0.5;
    CHECK_FALSE(in_dead_quadrant);
  }
  REQUIRE(result.wasserstein.available);
  CHECK(std::abs(result.wasserstein.value -
                 result.wasserstein.interior_cost -
                 result.wasserstein.boundary_cost) < 1e-12);
}

TEST_CASE("three dimensions run end to end") {
  std::string text = R"({
    "version": 1,
    "dim": 3,
    "initial_exponent": 2,
    "target_exponent": 4,
    "targets": [
      {"point": [0.25, 0.5, 0.5], "weight": 0.5},
      {"point": [0.75, 0.5, 0.5], "weight": 0.5}
    ]
  })";
  auto cfg = bmot::parse_config_text(text);
  auto result = bmot::run_boundary_method(cfg);
  CHECK(result.boundary.size() > 0);
  // 3D Euclidean cost has no closed-form box integral: the Wasserstein
  // value is unavailable but shifts still work.
  CHECK_FALSE(result.wasserstein.available);
  CHECK(result.shifts.value.size() == 2);
  CHECK(result.shifts.edges_used == 1);
  // Boundary boxes straddle the x = 1/2 plane unless they sit on a face of
  // the cube (edge boxes stay).
  std::size_t band = 0;
  for (std::size_t i = 0; i < result.boundary.size(); ++i) {
    bmot::Rect r = bmot::box_rect(result.geometry, result.boundary.level,
                                  result.boundary.keys[i]);
    bool straddles = r.lo[0] <= 0.5 + 1e-12 && r.hi[0] >= 0.5 - 1e-12;
    CHECK((straddles || touches_domain_edge(r, 3)));
    if (straddles) ++band;
  }
  CHECK(band > 0);
}

TEST_CASE("granularity snapping keeps the certificate honest") {
  std::string text = R"({
    "version": 1,
    "dim": 2,
    "initial_exponent": 3,
    "target_exponent": 6,
    "assignment_granularity": 2.0,
    "targets": [
      {"point": [0.25, 0.5], "weight": 0.5},
      {"point": [0.75, 0.5], "weight": 0.5}
    ]
  })";
  auto cfg = bmot::parse_config_text(text);
  auto result = bmot::run_boundary_method(cfg);
  REQUIRE(result.wasserstein.available);
  double exact = 0.2966167080344749;
  CHECK(std::abs(result.wasserstein.value - exact) <=
        result.wasserstein.error_bound);
}

#pragma once

#include <cstdint>
#include <vector>

#include "bmot/common.hpp"

namespace bmot {

// One summand k * lp(x - y)^q of a ground cost.  p may be infinity
// (max-norm).  Shorthands used in config files: "l1" = (1,1),
// "l2" = (2,1), "l2sq" = (2,2).
struct CostTerm {
  double k = 1.0;
  double p = 2.0;
  double q = 1.0;
};

// Ground cost c(x, y) = sum_s k_s * lp_s(x - y)^{q_s}.  Positive away from
// the diagonal, zero on it, symmetric, and continuous for every admissible
// parameter choice; a metric when every term has q == 1 and p >= 1.
class GroundCost {
 public:
  GroundCost() : GroundCost({CostTerm{1.0, 2.0, 1.0}}) {}
  explicit GroundCost(std::vector<CostTerm> terms);

  double operator()(const double* x, const double* y, int dim) const;

  // g(x) = c(x, yi) - c(x, yj); constant along the shared boundary of two
  // adjacent partition regions.
  double pair_difference(const double* x, const double* yi, const double* yj,
                         int dim) const;

  // Upper bound on c(x, y) over any two points of one axis-aligned box of
  // the given width: sum_s k_s * (width * d^{1/p_s})^{q_s}.
  double box_diameter_bound(double width, int dim) const;

  // True when the cost satisfies the triangle inequality (all q == 1 and
  // p >= 1), so partition regions are star-shaped around their targets.
  bool norm_like() const { return norm_like_; }

  // True when every term admits the analytic box integral used by the
  // Wasserstein finalization: either (p == 2, q == 1) in two dimensions or
  // q == p with finite p.
  bool closed_form_integrable(int dim) const;

  const std::vector<CostTerm>& terms() const { return terms_; }

  // lp(x - y)^q for a single exponent pair.
  static double lp_power(const double* x, const double* y, int dim, double p,
                         double q);

 private:
  std::vector<CostTerm> terms_;
  bool norm_like_ = false;
};

// Randomized self-check of the cost axioms on a domain [0, side]^dim:
// vanishing diagonal, symmetry, positivity off the diagonal, and -- when the
// cost claims to be a norm -- the triangle inequality.
struct AdmissibilityReport {
  int samples = 0;
  bool diagonal_ok = true;
  bool symmetry_ok = true;
  bool positivity_ok = true;
  bool triangle_ok = true;   // only probed for norm-like costs
  bool triangle_probed = false;
  bool ok() const {
    return diagonal_ok && symmetry_ok && positivity_ok && triangle_ok;
  }
};

AdmissibilityReport probe_admissibility(const GroundCost& cost, int dim,
                                        double side, int samples,
                                        std::uint64_t seed);

}  // namespace bmot

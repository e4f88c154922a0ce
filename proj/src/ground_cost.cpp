#include "bmot/ground_cost.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bmot {

namespace {

bool is_inf(double p) { return std::isinf(p) && p > 0; }

}  // namespace

GroundCost::GroundCost(std::vector<CostTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty())
    throw ConfigError("ground cost needs at least one term");
  for (std::size_t s = 0; s < terms_.size(); ++s) {
    const CostTerm& t = terms_[s];
    std::ostringstream where;
    where << "cost term " << s << ": ";
    if (!(t.k > 0) || !std::isfinite(t.k))
      throw ConfigError(where.str() + "scale k must be positive and finite");
    if (!(t.p > 0))
      throw ConfigError(where.str() + "exponent p must be positive");
    if (!(t.q > 0) || !std::isfinite(t.q))
      throw ConfigError(where.str() + "exponent q must be positive and finite");
  }
  norm_like_ = true;
  for (const CostTerm& t : terms_)
    if (t.q != 1.0 || (!is_inf(t.p) && t.p < 1.0)) norm_like_ = false;
}

double GroundCost::lp_power(const double* x, const double* y, int dim,
                            double p, double q) {
  if (is_inf(p)) {
    double m = 0.0;
    for (int a = 0; a < dim; ++a) m = std::max(m, std::abs(x[a] - y[a]));
    return q == 1.0 ? m : std::pow(m, q);
  }
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += std::pow(std::abs(x[a] - y[a]), p);
  if (q == p) return s;  // lp^p is the plain power sum; skip the root trip
  if (p == 2.0) {
    double r = std::sqrt(s);
    return q == 1.0 ? r : std::pow(r, q);
  }
  return std::pow(s, q / p);
}

double GroundCost::operator()(const double* x, const double* y,
                              int dim) const {
  double c = 0.0;
  for (const CostTerm& t : terms_) c += t.k * lp_power(x, y, dim, t.p, t.q);
  return c;
}

double GroundCost::pair_difference(const double* x, const double* yi,
                                   const double* yj, int dim) const {
  return (*this)(x, yi, dim) - (*this)(x, yj, dim);
}

double GroundCost::box_diameter_bound(double width, int dim) const {
  double b = 0.0;
  for (const CostTerm& t : terms_) {
    double diam = is_inf(t.p)
                      ? width
                      : width * std::pow(static_cast<double>(dim), 1.0 / t.p);
    b += t.k * std::pow(diam, t.q);
  }
  return b;
}

bool GroundCost::closed_form_integrable(int dim) const {
  for (const CostTerm& t : terms_) {
    bool euclidean = t.p == 2.0 && t.q == 1.0 && dim == 2;
    bool power_sum = !is_inf(t.p) && t.q == t.p;
    if (!euclidean && !power_sum) return false;
  }
  return true;
}

AdmissibilityReport probe_admissibility(const GroundCost& cost, int dim,
                                        double side, int samples,
                                        std::uint64_t seed) {
  AdmissibilityReport rep;
  rep.samples = samples;
  rep.triangle_probed = cost.norm_like();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  const double tol = 1e-12 * cost.box_diameter_bound(side, dim);
  for (int it = 0; it < samples; ++it) {
    Point x{}, y{}, z{};
    for (int a = 0; a < dim; ++a) {
      x[a] = u(rng);
      y[a] = u(rng);
      z[a] = u(rng);
    }
    double cxy = cost(x.data(), y.data(), dim);
    double cyx = cost(y.data(), x.data(), dim);
    if (cost(x.data(), x.data(), dim) != 0.0) rep.diagonal_ok = false;
    if (std::abs(cxy - cyx) > tol) rep.symmetry_ok = false;
    bool distinct = false;
    for (int a = 0; a < dim; ++a)
      if (x[a] != y[a]) distinct = true;
    if (distinct && !(cxy > 0.0)) rep.positivity_ok = false;
    if (rep.triangle_probed) {
      double cxz = cost(x.data(), z.data(), dim);
      double czy = cost(z.data(), y.data(), dim);
      if (cxy > cxz + czy + tol) rep.triangle_ok = false;
    }
  }
  return rep;
}

}  // namespace bmot

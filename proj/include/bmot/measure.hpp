#pragma once

#include <vector>

#include "bmot/common.hpp"

namespace bmot {

// Density profile of one piece, before the piecewise constant/coefficient
// scaling.  All profiles are separable, so box masses reduce to per-axis
// antiderivative differences.
enum class PieceKind {
  kUniform,   // 1
  kMonomial,  // prod_a x_a^t            (t >= 0)
  kExp,       // exp(t * x_axis)         (t != 0)
};

struct DensityPiece {
  Rect region;
  PieceKind kind = PieceKind::kUniform;
  double t = 0.0;
  int axis = 0;              // kExp only
  double coefficient = 1.0;  // positive multiplier
};

// Absolutely continuous probability measure on [0, side]^dim given by
// finitely many separable pieces with pairwise disjoint interiors.  The
// constructor normalizes total mass to one; regions of the domain covered by
// no piece carry zero density.
class Density {
 public:
  static Density build(std::vector<DensityPiece> pieces, int dim, double side);

  // Convenience: the uniform probability density on the whole domain.
  static Density uniform(int dim, double side);

  // Measure of box intersected with the domain.
  double box_mass(const Rect& box) const;

  // True when no piece overlaps the box on a set of positive volume, i.e.
  // the box is structurally outside the support.
  bool is_zero_on(const Rect& box) const;

  // Density value at a point (0 outside every piece).  Used by reference
  // integrators and the partition-mass raster.
  double value(const double* x) const;

  // All pieces uniform; required by the closed-form cost integrals.
  bool piecewise_uniform() const;

  int dim() const { return dim_; }
  double side() const { return side_; }
  const Rect& domain() const { return domain_; }
  double normalization() const { return normalization_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }

 private:
  Density() = default;
  double piece_integral(const DensityPiece& piece, const Rect& clipped) const;

  int dim_ = 0;
  double side_ = 1.0;
  Rect domain_;
  std::vector<DensityPiece> pieces_;
  double normalization_ = 1.0;  // unnormalized total mass
};

}  // namespace bmot

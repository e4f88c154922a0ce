#include "bmot/measure.hpp"

#include <cmath>
#include <sstream>

namespace bmot {

Density Density::build(std::vector<DensityPiece> pieces, int dim,
                       double side) {
  if (dim < 1 || dim > kMaxDim)
    throw ConfigError("density dimension out of range");
  if (!(side > 0) || !std::isfinite(side))
    throw ConfigError("domain side must be positive and finite");
  if (pieces.empty()) throw ConfigError("density needs at least one piece");

  Density d;
  d.dim_ = dim;
  d.side_ = side;
  d.domain_.dim = dim;
  for (int a = 0; a < dim; ++a) {
    d.domain_.lo[a] = 0.0;
    d.domain_.hi[a] = side;
  }

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    DensityPiece& p = pieces[i];
    std::ostringstream where;
    where << "density piece " << i << ": ";
    if (p.region.dim != dim)
      throw ConfigError(where.str() + "region dimension mismatch");
    for (int a = 0; a < dim; ++a) {
      if (!(p.region.lo[a] < p.region.hi[a]))
        throw ConfigError(where.str() + "region is empty on some axis");
      if (p.region.lo[a] < 0.0 || p.region.hi[a] > side)
        throw ConfigError(where.str() + "region leaves the domain");
    }
    if (!(p.coefficient > 0) || !std::isfinite(p.coefficient))
      throw ConfigError(where.str() + "coefficient must be positive");
    switch (p.kind) {
      case PieceKind::kUniform:
        break;
      case PieceKind::kMonomial:
        if (!(p.t >= 0) || !std::isfinite(p.t))
          throw ConfigError(where.str() + "monomial exponent must be >= 0");
        break;
      case PieceKind::kExp:
        if (p.t == 0 || !std::isfinite(p.t))
          throw ConfigError(where.str() + "exponential rate must be nonzero");
        if (p.axis < 0 || p.axis >= dim)
          throw ConfigError(where.str() + "exponential axis out of range");
        break;
    }
    for (std::size_t j = 0; j < i; ++j) {
      Rect overlap = intersect(p.region, pieces[j].region);
      if (!overlap.empty())
        throw ConfigError(where.str() + "region overlaps an earlier piece");
    }
  }
  d.pieces_ = std::move(pieces);

  double total = 0.0;
  for (const DensityPiece& p : d.pieces_) total += d.piece_integral(p, p.region);
  if (!(total > 0) || !std::isfinite(total))
    throw ConfigError("density has non-positive total mass");
  d.normalization_ = total;
  return d;
}

Density Density::uniform(int dim, double side) {
  DensityPiece p;
  p.region.dim = dim;
  for (int a = 0; a < dim; ++a) {
    p.region.lo[a] = 0.0;
    p.region.hi[a] = side;
  }
  return build({p}, dim, side);
}

double Density::piece_integral(const DensityPiece& piece,
                               const Rect& clipped) const {
  double v = piece.coefficient;
  switch (piece.kind) {
    case PieceKind::kUniform:
      for (int a = 0; a < dim_; ++a) v *= clipped.hi[a] - clipped.lo[a];
      break;
    case PieceKind::kMonomial: {
      double e = piece.t + 1.0;
      for (int a = 0; a < dim_; ++a)
        v *= (std::pow(clipped.hi[a], e) - std::pow(clipped.lo[a], e)) / e;
      break;
    }
    case PieceKind::kExp:
      for (int a = 0; a < dim_; ++a) {
        if (a == piece.axis)
          v *= (std::exp(piece.t * clipped.hi[a]) -
                std::exp(piece.t * clipped.lo[a])) /
               piece.t;
        else
          v *= clipped.hi[a] - clipped.lo[a];
      }
      break;
  }
  return v;
}

double Density::box_mass(const Rect& box) const {
  Rect inside = intersect(domain_, box);
  if (inside.empty()) return 0.0;
  double total = 0.0;
  for (const DensityPiece& p : pieces_) {
    Rect clipped = intersect(inside, p.region);
    if (clipped.empty()) continue;
    total += piece_integral(p, clipped);
  }
  return total / normalization_;
}

bool Density::is_zero_on(const Rect& box) const {
  Rect inside = intersect(domain_, box);
  if (inside.empty()) return true;
  for (const DensityPiece& p : pieces_)
    if (!intersect(inside, p.region).empty()) return false;
  return true;
}

double Density::value(const double* x) const {
  double v = 0.0;
  for (const DensityPiece& p : pieces_) {
    if (!p.region.contains(x)) continue;
    double f = p.coefficient;
    switch (p.kind) {
      case PieceKind::kUniform:
        break;
      case PieceKind::kMonomial:
        for (int a = 0; a < dim_; ++a) f *= std::pow(x[a], p.t);
        break;
      case PieceKind::kExp:
        f *= std::exp(p.t * x[p.axis]);
        break;
    }
    v += f;
  }
  return v / normalization_;
}

bool Density::piecewise_uniform() const {
  for (const DensityPiece& p : pieces_)
    if (p.kind != PieceKind::kUniform) return false;
  return true;
}

}  // namespace bmot

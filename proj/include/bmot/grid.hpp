#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "bmot/common.hpp"
#include "bmot/measure.hpp"

namespace bmot {

// Dyadic box hierarchy over [0, side]^dim.  Level 1 has width
// 2^-initial_exponent; every refinement halves the width.  Box indices pack
// 16 bits per axis (axis 0 most significant) into a 64-bit key, so
// ascending key order equals row-major order.
struct GridGeometry {
  int dim = 2;
  double side = 1.0;
  int initial_exponent = 4;

  double width(int level) const;
  std::uint64_t cells_per_axis(int level) const;
  int level_for_exponent(int exponent) const {
    return exponent - initial_exponent + 1;
  }
};

using AxisIndex = std::array<std::uint32_t, kMaxDim>;

std::uint64_t pack_key(const AxisIndex& idx, int dim);
AxisIndex unpack_key(std::uint64_t key, int dim);

// Key of the ancestor `levels_up` refinement steps above.
std::uint64_t ancestor_key(std::uint64_t key, int dim, int levels_up);

Rect box_rect(const GridGeometry& g, int level, std::uint64_t key);
Point box_center(const GridGeometry& g, int level, std::uint64_t key);

enum BoxFlags : std::uint8_t {
  kBoxEdge = 1,  // touches the domain boundary or a zero-density area
};

// The boxes still in play at one refinement level, sorted by key.  Labels
// are the auction destinations (-1 before the first solve).
struct ActiveSet {
  int level = 1;
  std::vector<std::uint64_t> keys;
  std::vector<double> mass;
  std::vector<std::int32_t> label;
  std::vector<std::uint8_t> flags;

  std::size_t size() const { return keys.size(); }
  std::ptrdiff_t find(std::uint64_t key) const;
};

// Labels of interior boxes that were discarded at earlier (or the current)
// level, queried during neighbor classification by walking up the ancestor
// chain.  Entries per level are key-sorted.
class FrozenHalo {
 public:
  void ensure_level(int level);
  void add(int level, std::uint64_t key, std::int32_t label);
  void finish_level(int level);  // sorts the batch added for a level

  // Label of the discarded box containing this level/key, or -1.
  std::int32_t lookup(int level, std::uint64_t key, int dim) const;

  const std::vector<std::pair<std::uint64_t, std::int32_t>>& at_level(
      int level) const {
    return levels_[level - 1];
  }
  int deepest_level() const { return static_cast<int>(levels_.size()); }

 private:
  std::vector<std::vector<std::pair<std::uint64_t, std::int32_t>>> levels_;
};

// What sits on the other side of each of the 3^dim - 1 neighbor offsets.
enum class NeighborKind {
  kOutside,  // beyond the domain boundary
  kZero,     // inside the domain but structurally zero density
  kActive,   // an active box at the same level
  kFrozen,   // inside a discarded interior box
};

struct NeighborRef {
  NeighborKind kind = NeighborKind::kOutside;
  std::ptrdiff_t active_pos = -1;  // kActive
  std::int32_t frozen_label = -1;  // kFrozen
};

// Fills `out` with one entry per neighbor offset, in lexicographic offset
// order; returns the number of entries (3^dim - 1).  A neighbor that is
// neither active nor frozen carries no mass by construction and reports as
// kZero.
int collect_neighbors(const GridGeometry& g, const FrozenHalo& halo,
                      const ActiveSet& active, std::size_t box_pos,
                      NeighborRef* out);

// Level-1 active set: every positive-mass box of the initial grid.
ActiveSet initial_grid(const GridGeometry& g, const Density& density,
                       int threads);

// Sets kBoxEdge on boxes with an outside or zero-density neighbor.
void mark_edges(const GridGeometry& g, const FrozenHalo& halo,
                ActiveSet& active, int threads);

// Splits every box of `boundary` into its 2^dim children, keeps the
// positive-mass ones with inherited labels, sorted by key.
ActiveSet refine(const GridGeometry& g, const Density& density,
                 const ActiveSet& boundary, int threads);

}  // namespace bmot

#include "bmot/grid.hpp"

#include <algorithm>
#include <cmath>

namespace bmot {

namespace {
constexpr int kBitsPerAxis = 16;
constexpr std::uint64_t kAxisMask = (std::uint64_t{1} << kBitsPerAxis) - 1;

int shift_for_axis(int axis) { return kBitsPerAxis * (kMaxDim - 1 - axis); }
}  // namespace

double GridGeometry::width(int level) const {
  return std::ldexp(1.0, -(initial_exponent + level - 1));
}

std::uint64_t GridGeometry::cells_per_axis(int level) const {
  double exact = side / width(level);
  double rounded = std::round(exact);
  if (std::abs(exact - rounded) > 1e-9 || rounded < 1)
    throw ConfigError("domain side is not a multiple of the box width");
  if (rounded > static_cast<double>(kAxisMask) + 1)
    throw ConfigError("grid level exceeds 65536 boxes per axis");
  return static_cast<std::uint64_t>(rounded);
}

std::uint64_t pack_key(const AxisIndex& idx, int dim) {
  std::uint64_t key = 0;
  for (int a = 0; a < dim; ++a)
    key |= (static_cast<std::uint64_t>(idx[a]) & kAxisMask)
           << shift_for_axis(a);
  return key;
}

AxisIndex unpack_key(std::uint64_t key, int dim) {
  AxisIndex idx{};
  for (int a = 0; a < dim; ++a)
    idx[a] = static_cast<std::uint32_t>((key >> shift_for_axis(a)) & kAxisMask);
  return idx;
}

std::uint64_t ancestor_key(std::uint64_t key, int dim, int levels_up) {
  AxisIndex idx = unpack_key(key, dim);
  for (int a = 0; a < dim; ++a) idx[a] >>= levels_up;
  return pack_key(idx, dim);
}

Rect box_rect(const GridGeometry& g, int level, std::uint64_t key) {
  const double w = g.width(level);
  AxisIndex idx = unpack_key(key, g.dim);
  Rect r;
  r.dim = g.dim;
  for (int a = 0; a < g.dim; ++a) {
    r.lo[a] = idx[a] * w;
    r.hi[a] = (idx[a] + 1) * w;
  }
  return r;
}

Point box_center(const GridGeometry& g, int level, std::uint64_t key) {
  const double w = g.width(level);
  AxisIndex idx = unpack_key(key, g.dim);
  Point c{};
  for (int a = 0; a < g.dim; ++a) c[a] = (idx[a] + 0.5) * w;
  return c;
}

std::ptrdiff_t ActiveSet::find(std::uint64_t key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return -1;
  return it - keys.begin();
}

void FrozenHalo::ensure_level(int level) {
  if (static_cast<int>(levels_.size()) < level) levels_.resize(level);
}

void FrozenHalo::add(int level, std::uint64_t key, std::int32_t label) {
  ensure_level(level);
  levels_[level - 1].push_back({key, label});
}

void FrozenHalo::finish_level(int level) {
  ensure_level(level);
  std::sort(levels_[level - 1].begin(), levels_[level - 1].end());
}

std::int32_t FrozenHalo::lookup(int level, std::uint64_t key, int dim) const {
  int top = std::min(level, deepest_level());
  for (int lv = top; lv >= 1; --lv) {
    std::uint64_t probe = ancestor_key(key, dim, level - lv);
    const auto& entries = levels_[lv - 1];
    auto it = std::lower_bound(
        entries.begin(), entries.end(), probe,
        [](const std::pair<std::uint64_t, std::int32_t>& e,
           std::uint64_t k) { return e.first < k; });
    if (it != entries.end() && it->first == probe) return it->second;
  }
  return -1;
}

int collect_neighbors(const GridGeometry& g, const FrozenHalo& halo,
                      const ActiveSet& active, std::size_t box_pos,
                      NeighborRef* out) {
  const int dim = g.dim;
  const std::uint64_t cells = g.cells_per_axis(active.level);
  AxisIndex idx = unpack_key(active.keys[box_pos], dim);

  int offsets = 1;
  for (int a = 0; a < dim; ++a) offsets *= 3;
  int written = 0;
  for (int code = 0; code < offsets; ++code) {
    int rest = code;
    int delta[kMaxDim] = {0, 0, 0, 0};
    bool all_zero = true;
    for (int a = dim - 1; a >= 0; --a) {
      delta[a] = rest % 3 - 1;
      rest /= 3;
      if (delta[a] != 0) all_zero = false;
    }
    if (all_zero) continue;

    NeighborRef ref;
    bool outside = false;
    AxisIndex nb = idx;
    for (int a = 0; a < dim; ++a) {
      std::int64_t v = static_cast<std::int64_t>(idx[a]) + delta[a];
      if (v < 0 || v >= static_cast<std::int64_t>(cells)) {
        outside = true;
        break;
      }
      nb[a] = static_cast<std::uint32_t>(v);
    }
    if (outside) {
      ref.kind = NeighborKind::kOutside;
      out[written++] = ref;
      continue;
    }
    std::uint64_t key = pack_key(nb, dim);
    std::ptrdiff_t pos = active.find(key);
    if (pos >= 0) {
      ref.kind = NeighborKind::kActive;
      ref.active_pos = pos;
      out[written++] = ref;
      continue;
    }
    std::int32_t frozen = halo.lookup(active.level, key, dim);
    if (frozen >= 0) {
      ref.kind = NeighborKind::kFrozen;
      ref.frozen_label = frozen;
      out[written++] = ref;
      continue;
    }
    ref.kind = NeighborKind::kZero;
    out[written++] = ref;
  }
  return written;
}

ActiveSet initial_grid(const GridGeometry& g, const Density& density,
                       int threads) {
  const std::uint64_t cells = g.cells_per_axis(1);
  std::uint64_t total = 1;
  for (int a = 0; a < g.dim; ++a) total *= cells;

  std::vector<std::uint64_t> keys;
  keys.reserve(total);
  AxisIndex idx{};
  for (std::uint64_t linear = 0; linear < total; ++linear) {
    std::uint64_t rest = linear;
    for (int a = g.dim - 1; a >= 0; --a) {
      idx[a] = static_cast<std::uint32_t>(rest % cells);
      rest /= cells;
    }
    keys.push_back(pack_key(idx, g.dim));
  }
  std::sort(keys.begin(), keys.end());

  std::vector<double> mass(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      mass[i] = density.box_mass(box_rect(g, 1, keys[i]));
  });

  ActiveSet out;
  out.level = 1;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!(mass[i] > 0)) continue;
    out.keys.push_back(keys[i]);
    out.mass.push_back(mass[i]);
  }
  out.label.assign(out.keys.size(), -1);
  out.flags.assign(out.keys.size(), 0);
  return out;
}

void mark_edges(const GridGeometry& g, const FrozenHalo& halo,
                ActiveSet& active, int threads) {
  parallel_for(active.size(), threads, [&](std::size_t begin,
                                           std::size_t end) {
    NeighborRef refs[80];  // 3^4 - 1 upper bound
    for (std::size_t i = begin; i < end; ++i) {
      int count = collect_neighbors(g, halo, active, i, refs);
      std::uint8_t f = active.flags[i] & ~kBoxEdge;
      for (int k = 0; k < count; ++k)
        if (refs[k].kind == NeighborKind::kOutside ||
            refs[k].kind == NeighborKind::kZero)
          f |= kBoxEdge;
      active.flags[i] = f;
    }
  });
}

ActiveSet refine(const GridGeometry& g, const Density& density,
                 const ActiveSet& boundary, int threads) {
  const int dim = g.dim;
  const int children = 1 << dim;
  std::vector<std::pair<std::uint64_t, std::int32_t>> kids;
  kids.reserve(boundary.size() * children);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    AxisIndex idx = unpack_key(boundary.keys[i], dim);
    for (int c = 0; c < children; ++c) {
      AxisIndex child{};
      for (int a = 0; a < dim; ++a)
        child[a] = 2 * idx[a] + ((c >> (dim - 1 - a)) & 1);
      kids.push_back({pack_key(child, dim), boundary.label[i]});
    }
  }
  std::sort(kids.begin(), kids.end());

  const int next_level = boundary.level + 1;
  std::vector<double> mass(kids.size());
  parallel_for(kids.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      mass[i] = density.box_mass(box_rect(g, next_level, kids[i].first));
  });

  ActiveSet out;
  out.level = next_level;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (!(mass[i] > 0)) continue;
    out.keys.push_back(kids[i].first);
    out.mass.push_back(mass[i]);
    out.label.push_back(kids[i].second);
  }
  out.flags.assign(out.keys.size(), 0);
  return out;
}

}  // namespace bmot

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace bmot {

// Hard upper bound on the spatial dimension.  Box indices are packed 16 bits
// per axis into a 64-bit key, so four axes is the natural ceiling.
inline constexpr int kMaxDim = 4;

// A point in R^d, stored in a fixed-size array.  Coordinates at positions
// >= dim must be zero so that distance loops can run over the full array
// when convenient.
using Point = std::array<double, kMaxDim>;

// Axis-aligned box [lo, hi] per axis.
struct Rect {
  int dim = 0;
  Point lo{};
  Point hi{};

  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= hi[a] - lo[a];
    return v;
  }
  bool empty() const {
    for (int a = 0; a < dim; ++a)
      if (hi[a] <= lo[a]) return true;
    return dim == 0;
  }
  bool contains(const double* x) const {
    for (int a = 0; a < dim; ++a)
      if (x[a] < lo[a] || x[a] > hi[a]) return false;
    return true;
  }
};

// Intersection of two boxes; empty() when they do not overlap.
Rect intersect(const Rect& a, const Rect& b);

// Invalid user input: malformed files, out-of-range parameters, inconsistent
// problem data.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation could not reach its accuracy or termination target (solver
// stall, disconnected adjacency, ...).  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Filesystem failure (missing file, unwritable output).  Exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Runs fn(begin, end) over a disjoint partition of [0, n), on up to
// `threads` worker threads.  Workers must write only to slots of
// preallocated buffers indexed by their range, so the result is identical
// for every thread count; all reductions stay with the caller.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

// Shortest decimal string that round-trips the value (used for CSV output;
// JSON output goes through the serializer's own round-trip formatting).
std::string format_double(double v);

}  // namespace bmot

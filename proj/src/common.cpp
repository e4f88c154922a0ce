#include "bmot/common.hpp"

#include <algorithm>
#include <charconv>
#include <thread>
#include <vector>

namespace bmot {

Rect intersect(const Rect& a, const Rect& b) {
  Rect r;
  r.dim = a.dim;
  for (int ax = 0; ax < a.dim; ++ax) {
    r.lo[ax] = std::max(a.lo[ax], b.lo[ax]);
    r.hi[ax] = std::min(a.hi[ax], b.hi[ax]);
  }
  return r;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  workers = std::min(workers, n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace bmot

#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>

#include "strings.hpp"

namespace geograph::detail {

unsigned resolve_workers(unsigned requested) {
  unsigned n = requested == 0 ? std::thread::hardware_concurrency() : requested;
  if (const char* cap = std::getenv("GEOGRAPH_THREADS")) {
    if (auto v = parse_int(trim(cap)); v && *v > 0) {
      n = std::min<unsigned>(n == 0 ? 1 : n, static_cast<unsigned>(std::min<std::int64_t>(*v, 1024)));
    }
  }
  return std::max(1u, n);
}

}  // namespace geograph::detail

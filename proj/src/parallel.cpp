#include "m1dg/parallel.hpp"

namespace m1dg {

int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

} // namespace m1dg

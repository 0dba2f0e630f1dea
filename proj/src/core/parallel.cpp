#include "core/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace dtlab {

namespace {
std::atomic<int> g_workers{1};
}

void set_worker_count(int n) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  g_workers.store(std::clamp(n, 1, std::max(1, hw > 0 ? hw : 8)));
}

int worker_count() { return g_workers.load(); }

}  // namespace dtlab

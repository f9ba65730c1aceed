#include "tabeval/util.hpp"

#include <atomic>

namespace tabeval {

namespace {
std::atomic<std::size_t> g_thread_limit{0};
}

std::size_t hardware_threads() {
  const std::size_t limit = g_thread_limit.load();
  if (limit > 0) return limit;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void set_thread_limit(std::size_t n) { g_thread_limit.store(n); }

}  // namespace tabeval

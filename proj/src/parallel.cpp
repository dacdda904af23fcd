#include "seed/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace seed {

namespace {

std::atomic<unsigned> g_max_threads{0};

unsigned hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

thread_local bool t_inside_parallel = false;

}  // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
  const unsigned n = g_max_threads.load();
  return n == 0 ? hardware_threads() : n;
}

void parallel_for(Index n, const std::function<void(Index, Index)>& fn) {
  if (n <= 0) return;
  const unsigned workers = std::min<unsigned>(max_threads(), static_cast<unsigned>(n));
  if (workers <= 1 || t_inside_parallel) {
    fn(0, n);
    return;
  }

  const Index chunk = (n + static_cast<Index>(workers) - 1) / static_cast<Index>(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    const Index begin = static_cast<Index>(w) * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      t_inside_parallel = true;
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace seed

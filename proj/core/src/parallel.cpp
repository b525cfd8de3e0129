#include "nlfilt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace nlfilt {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  g_threads.store(threads);
}

int thread_count() { return g_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  if (workers == 1 || count < 64) {
    body(0, count);
    return;
  }
  const std::size_t blocks = std::min(workers, count);
  const std::size_t chunk = (count + blocks - 1) / blocks;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(blocks);
  pool.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, b, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nlfilt

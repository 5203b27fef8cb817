#include "lap2d/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lap2d {

namespace {
std::atomic<unsigned> thread_request{0};
}  // namespace

void set_thread_request(unsigned n) { thread_request.store(n); }

unsigned thread_budget() {
  if (const unsigned requested = thread_request.load(); requested > 0)
    return requested;
  static const unsigned budget = [] {
    if (const char* env = std::getenv("LAP2D_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      return unsigned(std::max(1L, v));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp(hw, 1u, 8u);
  }();
  return budget;
}

void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
  const unsigned budget =
      unsigned(std::min<size_t>(thread_budget(), count));
  if (budget <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(budget);
  for (unsigned t = 0; t < budget; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lap2d

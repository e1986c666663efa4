#include "geosplit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace geosplit {

namespace {

std::size_t initial_threads() {
  if (const char* env = std::getenv("GEOSPLIT_THREADS")) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
    }
  }
  return 0;
}

std::atomic<std::size_t>& thread_cap() {
  static std::atomic<std::size_t> cap{initial_threads()};
  return cap;
}

}  // namespace

void set_max_threads(std::size_t n) { thread_cap().store(n); }

std::size_t max_threads() {
  const std::size_t cap = thread_cap().load();
  if (cap != 0) return cap;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  constexpr std::size_t kMinChunk = 256;
  const std::size_t workers = std::min(max_threads(), (n + kMinChunk - 1) / kMinChunk);
  if (workers <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace geosplit

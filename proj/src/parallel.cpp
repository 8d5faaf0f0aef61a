#include "scapegeom/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace scapegeom {

unsigned thread_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("SCAPEGEOM_THREADS")) {
    try {
      n = static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      n = 0;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_chunks(size_t n, const std::function<void(size_t, size_t, unsigned)>& body,
                     unsigned max_workers) {
  if (n == 0) return;
  unsigned workers = thread_count();
  if (max_workers > 0) workers = std::min(workers, max_workers);
  workers = static_cast<unsigned>(std::min<size_t>(workers, n));
  if (workers <= 1) {
    body(0, n, 0);
    return;
  }
  const size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace scapegeom

#include "focksep/parallel.hpp"

#include <atomic>
#include <mutex>

#include <omp.h>

namespace focksep::par {

namespace {
std::atomic<int> g_workers{0};
}

void set_workers(int n) { g_workers.store(n < 0 ? 0 : n); }

int workers() {
  const int n = g_workers.load();
  return n > 0 ? n : omp_get_max_threads();
}

void for_index(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  const int nthreads = workers();
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

void for_index_serial(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace focksep::par

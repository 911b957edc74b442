#include "cubar/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace cubar {

int thread_cap() {
  if (const char* env = std::getenv("CUBAR_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

void for_range(std::size_t n, Exec mode, const std::function<void(std::size_t)>& body) {
  if (mode == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cubar

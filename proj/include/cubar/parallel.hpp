#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

namespace cubar {

// Worker count for the parallel kernels: CUBAR_THREADS when set to a positive integer,
// otherwise the OpenMP default.
int thread_cap();

enum class Exec { Serial, Parallel };

// Runs body(i) for i in [0, n). Parallel runs use dynamic scheduling; the first exception
// (lowest index) is rethrown after the loop so results never depend on the schedule.
void for_range(std::size_t n, Exec mode, const std::function<void(std::size_t)>& body);

template <class T>
std::vector<T> map_range(std::size_t n, Exec mode, const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(n);
  for_range(n, mode, [&](std::size_t i) { slots[i].emplace(f(i)); });
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace cubar

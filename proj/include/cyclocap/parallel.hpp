#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace cyclocap {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path used by the tests; both paths produce bitwise identical results
/// because every reduction happens after the loop, in index order.
enum class Exec { serial, parallel };

/// Runs f(i) for i in [0, n). Exceptions thrown inside the OpenMP region are
/// captured and the one from the lowest index is rethrown afterwards.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace cyclocap

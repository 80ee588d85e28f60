#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace loadbal {

// Every data-parallel kernel in the library has a serial reference path that
// the tests compare against; both paths produce identical results.
enum class Execution { Serial, Parallel };

// Thread count for parallel kernels: LOADBAL_THREADS when set to a positive
// integer, otherwise the OpenMP default.
int thread_limit();

// Calls fn(i) for every i in [0, count). Under Execution::Parallel the calls
// are spread over OpenMP threads with dynamic scheduling; the first exception
// thrown by any call is rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t count, Execution exec, Fn&& fn) {
  if (exec == Execution::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_limit())
  for (long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace loadbal

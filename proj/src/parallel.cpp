#include "loadbal/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace loadbal {

int thread_limit() {
  if (const char* env = std::getenv("LOADBAL_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace loadbal

#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hydap {

// Worker count for OpenMP kernels. 0 = runtime default.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n). Parallel when OpenMP is enabled; every
// iteration must write only to its own slots so the result is identical
// for any worker count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace hydap

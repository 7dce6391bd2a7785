#include "hydap/parallel.hpp"

namespace hydap {

namespace {
int g_threads = 0;
}

void set_thread_count(int n) {
  g_threads = n;
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#endif
}

int thread_count() { return g_threads; }

}  // namespace hydap

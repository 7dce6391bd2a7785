// Compares the OpenMP kernels against their serial reference implementations
// and checks that both produce identical bytes.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "hydap/dissimilarity.hpp"
#include "hydap/parallel.hpp"
#include "hydap/simgen.hpp"

using Clock = std::chrono::steady_clock;

static double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : 0;
  hydap::set_thread_count(threads);
  std::printf("%-10s %-10s %8s %12s %12s %8s %s\n", "measure", "setting", "n",
              "serial_s", "parallel_s", "speedup", "identical");
  for (hydap::Index scale : {1, 4, 10}) {
    hydap::SimSpec spec;
    spec.setting = hydap::SimSetting::sim1b;
    spec.sizes = {40 * scale, 40 * scale, 120 * scale};
    spec.seed = 7;
    hydap::MixedDataset ds = hydap::generate(spec).dataset;
    for (hydap::Measure m : {hydap::Measure::hydap, hydap::Measure::gower,
                             hydap::Measure::famd}) {
      auto t0 = Clock::now();
      hydap::DissimMatrix serial = hydap::pairwise_matrix_serial(ds, m);
      auto t1 = Clock::now();
      hydap::DissimMatrix parallel = hydap::pairwise_matrix(ds, m);
      auto t2 = Clock::now();
      bool same = serial.values.size() == parallel.values.size() &&
                  std::memcmp(serial.values.data(), parallel.values.data(),
                              serial.values.size() * sizeof(double)) == 0;
      double ts = seconds(t0, t1), tp = seconds(t1, t2);
      std::printf("%-10s %-10s %8zu %12.4f %12.4f %8.2f %s\n",
                  hydap::measure_to_string(m).c_str(), "sim1b", ds.n, ts, tp,
                  ts / tp, same ? "yes" : "NO");
      if (!same) return 1;
    }
  }
  return 0;
}

// Compares the serial reference driver against the OpenMP driver on the
// built-in benchmark and checks that both produce the same numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "slopecal/experiments.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t replicates = 2000;
  if (argc > 1) replicates = static_cast<std::size_t>(std::atoll(argv[1]));
  const auto cfg = slopecal::fig1_config(replicates, 7);

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("replicates=%zu n=%zu models=%zu threads=%d\n", cfg.replicates, cfg.n,
              cfg.dims.size(), threads);

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = slopecal::run_benchmark_serial(cfg);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = slopecal::run_benchmark(cfg);
  const double t_parallel = seconds_since(t0);

  std::printf("serial:   %8.3f s   c_or = (%.4f, %.4f, %.4f)\n", t_serial,
              serial.c_or_thresh, serial.c_or_maxjump, serial.c_or_mallows);
  std::printf("parallel: %8.3f s   c_or = (%.4f, %.4f, %.4f)\n", t_parallel,
              parallel.c_or_thresh, parallel.c_or_maxjump, parallel.c_or_mallows);
  std::printf("speedup:  %8.2fx\n", t_serial / t_parallel);

  const bool identical = serial.c_or_thresh == parallel.c_or_thresh &&
                         serial.c_or_maxjump == parallel.c_or_maxjump &&
                         serial.c_or_mallows == parallel.c_or_mallows &&
                         serial.case_freqs == parallel.case_freqs &&
                         serial.failed_replicates == parallel.failed_replicates;
  std::printf("outputs %s\n", identical ? "identical" : "DIFFER");
  return identical ? 0 : 1;
}

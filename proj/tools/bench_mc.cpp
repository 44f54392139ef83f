// Times the OpenMP Monte-Carlo kernels against their serial references and
// checks that both produce identical estimates.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "edgesim/config.hpp"
#include "edgesim/retransmission.hpp"

namespace {

template <class F>
double seconds(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  using namespace edgesim;

  std::printf("threads: %d\n", omp_get_max_threads());

  ExperimentConfig exp;
  const long trials = 20000;

  for (int k : {4, 10, 20}) {
    const SystemConfig sys = make_system_config(exp, k);
    CompletionEstimate par, ser;
    const double tp = seconds([&] { par = avg_completion_mc(sys, trials, 42); });
    const double ts = seconds([&] { ser = avg_completion_mc_serial(sys, trials, 42); });
    const bool same = par.mean_s == ser.mean_s && par.stderr_s == ser.stderr_s;
    std::printf("completion K=%-2d  parallel %7.3fs  serial %7.3fs  speedup %4.2fx  identical=%s\n",
                k, tp, ts, ts / tp, same ? "yes" : "NO");
  }

  {
    std::vector<double> p(16, 0.5), w(16, 1.0);
    MeanVar par, ser;
    const double tp = seconds([&] { par = expected_max_weighted_tx_mc(p, w, 4000000, 7); });
    const double ts = seconds([&] { ser = expected_max_weighted_tx_mc_serial(p, w, 4000000, 7); });
    const bool same = par.mean == ser.mean && par.variance == ser.variance;
    std::printf("weighted-max MC  parallel %7.3fs  serial %7.3fs  speedup %4.2fx  identical=%s\n",
                tp, ts, ts / tp, same ? "yes" : "NO");
  }
  return 0;
}

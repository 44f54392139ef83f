#ifndef EDGESIM_PARALLEL_HPP
#define EDGESIM_PARALLEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace edgesim {

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  long trials = 0;

  double std_error() const {
    return trials > 0 ? std::sqrt(variance / static_cast<double>(trials)) : 0.0;
  }
};

namespace detail {
// Trials are summed inside fixed 4096-wide blocks and the block partials are
// combined in index order. The grouping is part of the result's definition:
// the parallel and serial evaluators produce bit-identical sums for any
// thread count.
constexpr long kReduceBlock = 4096;

template <class F>
inline void block_partials(long trials, F&& value_of_trial, long block,
                           double& sum, double& sumsq) {
  const long begin = block * kReduceBlock;
  const long end = std::min(begin + kReduceBlock, trials);
  double s = 0.0, q = 0.0;
  for (long t = begin; t < end; ++t) {
    const double v = value_of_trial(t);
    s += v;
    q += v * v;
  }
  sum = s;
  sumsq = q;
}

inline MeanVar combine_blocks(const std::vector<double>& bsum,
                              const std::vector<double>& bsq, long trials) {
  double s = 0.0, q = 0.0;
  for (std::size_t b = 0; b < bsum.size(); ++b) {
    s += bsum[b];
    q += bsq[b];
  }
  MeanVar out;
  out.trials = trials;
  out.mean = s / static_cast<double>(trials);
  if (trials > 1) {
    const double ss = q - s * s / static_cast<double>(trials);
    out.variance = std::max(0.0, ss / static_cast<double>(trials - 1));
  }
  return out;
}
}  // namespace detail

/// Mean and unbiased variance of `value_of_trial(t)` over t in [0, trials),
/// evaluated in parallel. `value_of_trial` must be pure given t.
template <class F>
MeanVar block_mean_var(long trials, F&& value_of_trial) {
  const long nblocks = (trials + detail::kReduceBlock - 1) / detail::kReduceBlock;
  std::vector<double> bsum(static_cast<std::size_t>(nblocks));
  std::vector<double> bsq(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nblocks; ++b) {
    detail::block_partials(trials, value_of_trial, b,
                           bsum[static_cast<std::size_t>(b)],
                           bsq[static_cast<std::size_t>(b)]);
  }
  return detail::combine_blocks(bsum, bsq, trials);
}

/// Serial reference for block_mean_var; same block structure, same bits.
template <class F>
MeanVar block_mean_var_serial(long trials, F&& value_of_trial) {
  const long nblocks = (trials + detail::kReduceBlock - 1) / detail::kReduceBlock;
  std::vector<double> bsum(static_cast<std::size_t>(nblocks));
  std::vector<double> bsq(static_cast<std::size_t>(nblocks));
  for (long b = 0; b < nblocks; ++b) {
    detail::block_partials(trials, value_of_trial, b,
                           bsum[static_cast<std::size_t>(b)],
                           bsq[static_cast<std::size_t>(b)]);
  }
  return detail::combine_blocks(bsum, bsq, trials);
}

}  // namespace edgesim

#endif

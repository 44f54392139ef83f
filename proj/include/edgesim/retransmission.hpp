#ifndef EDGESIM_RETRANSMISSION_HPP
#define EDGESIM_RETRANSMISSION_HPP

#include <cstdint>
#include <vector>

#include "edgesim/parallel.hpp"

namespace edgesim {

/// Number-of-transmissions distribution of a retransmit-until-success link
/// with per-attempt outage probability p: P[L = l] = p^{l-1}(1 - p).
struct TxCountModel {
  double p = 0.0;

  void validate() const;  // p in [0, 1); p = 1 diverges
};

double geometric_pmf(const TxCountModel& model, long l);

/// Inverse-CDF sampler: the smallest L with 1 - p^L > uniform_draw.
long sample_tx_count(const TxCountModel& model, double uniform_draw);

/// E[max of k iid transmission counts], evaluated as the complementary-CDF
/// sum over L >= 0 of 1 - (1 - p^L)^k, truncated once the tail term drops
/// below 1e-12. Mathematically identical to the alternating binomial series
/// but stable for large k.
double expected_max_tx_iid(double p, int k_devices);

/// Alternating binomial series sum_{q=1..k} C(k,q) (-1)^{q+1} / (1 - p^q).
/// Kept as a cross-check oracle; cancellation makes it unreliable past
/// k ~ 25, use expected_max_tx_iid for production values.
double expected_max_tx_series(double p, int k_devices);

struct TxBounds {
  double lower = 0.0;  // 1 / (1 - p)
  double upper = 0.0;  // k / (1 - p)
};

/// Order-statistics sandwich: 1/(1-p) <= E[max] <= k/(1-p).
TxBounds expected_max_tx_bounds(double p, int k_devices);

/// Monte-Carlo estimate of E[max_k w_k L_k] for independent geometric
/// counts with heterogeneous outages. Deterministic given the seed.
MeanVar expected_max_weighted_tx_mc(const std::vector<double>& outages,
                                    const std::vector<double>& weights,
                                    long trials, std::uint64_t seed);

/// Serial reference implementation; bit-identical to the parallel version.
MeanVar expected_max_weighted_tx_mc_serial(const std::vector<double>& outages,
                                           const std::vector<double>& weights,
                                           long trials, std::uint64_t seed);

}  // namespace edgesim

#endif

#ifndef EDGESIM_COMPLETION_HPP
#define EDGESIM_COMPLETION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "edgesim/channel.hpp"

namespace edgesim {

/// Every scalar parameter of the system model. SNRs are linear scale here;
/// dB-to-linear conversion happens once at profile construction.
struct SystemConfig {
  long n_total = 4600;
  int k_devices = 1;
  RadioConfig radio;
  SnrProfile snr;
  double slot_seconds = 1e-3;
  double eps_local = 1e-3;
  double eps_gap = 1e-3;
  double lambda_reg = 1e-2;
  double mu_smooth = 1.0;
  double zeta_convex = 1.0;
  std::vector<double> compute_consts;   // c_k, seconds per example per local iteration
  std::vector<long> partition_sizes;    // n_k, sums to n_total
  std::optional<double> sigma_product;  // sigma' * sigma_max; empty = N/K default
  bool per_example_dist = false;        // sensitivity switch: sum n_k independent counts

  void validate() const;
  double effective_sigma_product() const;
  double max_partition() const;
  double max_compute_load() const;  // max_k c_k n_k
};

struct CompletionEstimate {
  double mean_s = 0.0;
  double stderr_s = 0.0;
  long trials = 0;
  double lower_bound_s = 0.0;
  double upper_bound_s = 0.0;
  long iterations_m_k = 0;
  bool divergent = false;  // a phase outage rounded to certainty
};

struct CompletionBounds {
  double lower_s = 0.0;
  double upper_s = 0.0;
  bool divergent = false;
};

/// Theorem-1 iteration budget:
/// M_K = ceil( K/(1-eps_l) * (A + S)/A * ln( (A + S)/((1-eps_l) A) * K/eps_G ) )
/// with A = mu * zeta * lambda * N and S = sigma' * sigma_max. A degenerate
/// parameterization (expression <= 0) clamps to 1 and sets *degenerate.
long global_iterations(const SystemConfig& cfg, bool* degenerate = nullptr);

/// c_k * n_k / eps_local, the per-iteration gradient-descent time.
double local_compute_time(double c_k, long n_k, double eps_local);

/// Proposition-1 closed-form bounds. The worst case pins every device to the
/// minimum mean SNR, the best case to the maximum; order-statistic
/// expectations use the CCDF form of E[max].
CompletionBounds completion_bounds(const SystemConfig& cfg);

/// Monte-Carlo average completion time. Per trial: one data-distribution
/// phase omega * max_k(n_k L_dist_k), then M_K iterations each drawing fresh
/// upload maxima and one multicast count. Deterministic given the seed.
CompletionEstimate avg_completion_mc(const SystemConfig& cfg, long trials, std::uint64_t seed);

/// Same, with the upload/dist/mul outages supplied explicitly (the NOMA
/// path substitutes its Monte-Carlo upload outages here).
CompletionEstimate avg_completion_mc_with(const SystemConfig& cfg,
                                          const PhaseOutages& outages,
                                          long trials, std::uint64_t seed);

/// Serial reference; bit-identical to avg_completion_mc.
CompletionEstimate avg_completion_mc_serial(const SystemConfig& cfg, long trials,
                                            std::uint64_t seed);

/// Centralized baseline c * N / eps_gap.
double centralized_time(double c, long n_total, double eps_gap);

/// Large-dataset two-term upper bound:
/// omega * N / (1 - p_dist_max) + M_K * max_k{c_k n_k} / eps_l.
double large_data_upper(const SystemConfig& cfg);

}  // namespace edgesim

#endif

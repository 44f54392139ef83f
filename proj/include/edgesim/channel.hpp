#ifndef EDGESIM_CHANNEL_HPP
#define EDGESIM_CHANNEL_HPP

#include <cstdint>
#include <vector>

namespace edgesim {

/// Per-device mean received SNRs, linear scale. rho_bar applies on the
/// device side (data distribution, multicast reception), eta_bar on the
/// parameter-server side (local update delivery).
struct SnrProfile {
  std::vector<double> rho_bar;
  std::vector<double> eta_bar;

  int devices() const { return static_cast<int>(rho_bar.size()); }
  void validate() const;  // throws std::invalid_argument
};

/// Total bandwidth and the fixed per-phase transmission rates.
struct RadioConfig {
  double bandwidth_hz = 20e6;
  double rate_dist_bps = 5e6;
  double rate_up_bps = 5e6;
  double rate_mul_bps = 5e6;

  void validate() const;
};

/// Outage probabilities for the three communication phases. p_dist and p_up
/// are per device; multicast is pinned to the worst receiver so p_mul is a
/// single value.
struct PhaseOutages {
  std::vector<double> p_dist;
  std::vector<double> p_up;
  double p_mul = 0.0;

  void validate() const;
};

/// True when a computed outage has rounded to certainty; downstream expected
/// transmission counts are +inf rather than overflowing.
inline bool certain_outage(double p) { return p >= 1.0; }

double db_to_linear(double db);
double linear_to_db(double linear);

/// Data-distribution outage for one device under uniform B/K, P/K shares:
/// 1 - exp(-(2^{K R_dist / B} - 1) / rho_bar_k).
double outage_data_dist(double rho_bar_k, int k_devices, const RadioConfig& radio);

/// OMA local-update outage: 1 - exp(-(2^{K R_up / B} - 1) / (K eta_bar_k)).
/// The device keeps full transmit power on a 1/K bandwidth share, so the
/// effective SNR grows with K while the rate threshold grows faster.
double outage_local_update_oma(double eta_bar_k, int k_devices, const RadioConfig& radio);

/// Multicast outage against the worst receiver. The minimum of independent
/// exponentials is exponential with summed rates, giving
/// 1 - exp(-(2^{R_mul / B} - 1) * sum_k 1/rho_bar_k).
double outage_multicast(const SnrProfile& snr, const RadioConfig& radio);

enum class ExtremeSnr { worst, best };

/// Multicast outage when all K receivers are pinned to one extreme mean SNR:
/// 1 - exp(-(K / snr) (2^{R_mul / B} - 1)). `which` only documents whether
/// the caller passed rho_min (worst) or rho_max (best); the planner passes
/// K+1 here when bounding the grown system.
double outage_multicast_extreme(double extreme_snr, int k_devices,
                                const RadioConfig& radio, ExtremeSnr which);

/// Monte-Carlo NOMA local-update outage per device. Each trial draws
/// instantaneous SNRs, re-sorts devices in descending order (the SIC
/// decoding order), and tests R_up > B log2(1 + eta_k / (sum_{j>k} eta_j + 1))
/// rank by rank. Estimates are reported against device identity, not rank.
/// Deterministic for a fixed seed regardless of thread count.
std::vector<double> outage_local_update_noma(const SnrProfile& snr,
                                             const RadioConfig& radio,
                                             long trials, std::uint64_t seed);

/// All three OMA phase outages for a full profile.
PhaseOutages phase_outages_oma(const SnrProfile& snr, const RadioConfig& radio);

}  // namespace edgesim

#endif

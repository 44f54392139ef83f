#include "edgesim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

void require_finite_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::domain_error(std::string(what) + " must be finite and positive");
  }
}

// 2^{k * rate / bandwidth} - 1, the SNR threshold of a fixed-rate link that
// holds a 1/k share of the band.
double snr_threshold(double rate, double bandwidth, int k) {
  return std::exp2(static_cast<double>(k) * rate / bandwidth) - 1.0;
}

// 1 - exp(-x) without cancellation; saturates cleanly at 1.
double outage_from_exponent(double x) { return -std::expm1(-x); }

}  // namespace

void SnrProfile::validate() const {
  if (rho_bar.empty() || rho_bar.size() != eta_bar.size()) {
    throw std::invalid_argument("SnrProfile: rho_bar and eta_bar must be non-empty and equal length");
  }
  for (double v : rho_bar) require_finite_positive(v, "SnrProfile.rho_bar entry");
  for (double v : eta_bar) require_finite_positive(v, "SnrProfile.eta_bar entry");
}

void RadioConfig::validate() const {
  require_finite_positive(bandwidth_hz, "RadioConfig.bandwidth_hz");
  require_finite_positive(rate_dist_bps, "RadioConfig.rate_dist_bps");
  require_finite_positive(rate_up_bps, "RadioConfig.rate_up_bps");
  require_finite_positive(rate_mul_bps, "RadioConfig.rate_mul_bps");
}

void PhaseOutages::validate() const {
  if (p_dist.size() != p_up.size()) {
    throw std::invalid_argument("PhaseOutages: p_dist and p_up must have equal length");
  }
  auto check = [](double p) {
    if (!(p >= 0.0) || p >= 1.0) {
      throw std::invalid_argument("PhaseOutages: probabilities must lie in [0, 1)");
    }
  };
  for (double p : p_dist) check(p);
  for (double p : p_up) check(p);
  check(p_mul);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double outage_data_dist(double rho_bar_k, int k_devices, const RadioConfig& radio) {
  require_finite_positive(rho_bar_k, "rho_bar_k");
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  radio.validate();
  return outage_from_exponent(snr_threshold(radio.rate_dist_bps, radio.bandwidth_hz, k_devices) / rho_bar_k);
}

double outage_local_update_oma(double eta_bar_k, int k_devices, const RadioConfig& radio) {
  require_finite_positive(eta_bar_k, "eta_bar_k");
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  radio.validate();
  const double thr = snr_threshold(radio.rate_up_bps, radio.bandwidth_hz, k_devices);
  return outage_from_exponent(thr / (static_cast<double>(k_devices) * eta_bar_k));
}

double outage_multicast(const SnrProfile& snr, const RadioConfig& radio) {
  snr.validate();
  radio.validate();
  double rate_sum = 0.0;
  for (double rho : snr.rho_bar) rate_sum += 1.0 / rho;
  return outage_from_exponent(snr_threshold(radio.rate_mul_bps, radio.bandwidth_hz, 1) * rate_sum);
}

double outage_multicast_extreme(double extreme_snr, int k_devices,
                                const RadioConfig& radio, ExtremeSnr which) {
  (void)which;  // worst/best is the caller's choice of extreme_snr
  require_finite_positive(extreme_snr, "extreme_snr");
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  radio.validate();
  const double thr = snr_threshold(radio.rate_mul_bps, radio.bandwidth_hz, 1);
  return outage_from_exponent(static_cast<double>(k_devices) * thr / extreme_snr);
}

std::vector<double> outage_local_update_noma(const SnrProfile& snr,
                                             const RadioConfig& radio,
                                             long trials, std::uint64_t seed) {
  snr.validate();
  radio.validate();
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  const int k = snr.devices();
  // Full band, so the SINR threshold does not scale with K.
  const double thr = std::exp2(radio.rate_up_bps / radio.bandwidth_hz) - 1.0;

  std::vector<long> counts(static_cast<std::size_t>(k), 0);
#pragma omp parallel
  {
    std::vector<long> local(static_cast<std::size_t>(k), 0);
    std::vector<std::pair<double, int>> draw(static_cast<std::size_t>(k));
#pragma omp for schedule(static) nowait
    for (long t = 0; t < trials; ++t) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
      for (int i = 0; i < k; ++i) {
        draw[static_cast<std::size_t>(i)] = {rng.exponential(snr.eta_bar[static_cast<std::size_t>(i)]), i};
      }
      std::sort(draw.begin(), draw.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // stable under exact ties
      });
      double interference = 0.0;
      for (int r = k - 1; r >= 0; --r) {
        const auto& [eta, id] = draw[static_cast<std::size_t>(r)];
        if (eta < thr * (interference + 1.0)) {
          ++local[static_cast<std::size_t>(id)];
        }
        interference += eta;
      }
    }
#pragma omp critical
    for (int i = 0; i < k; ++i) counts[static_cast<std::size_t>(i)] += local[static_cast<std::size_t>(i)];
  }

  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out[static_cast<std::size_t>(i)] =
        static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(trials);
  }
  return out;
}

PhaseOutages phase_outages_oma(const SnrProfile& snr, const RadioConfig& radio) {
  snr.validate();
  const int k = snr.devices();
  PhaseOutages out;
  out.p_dist.reserve(static_cast<std::size_t>(k));
  out.p_up.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.p_dist.push_back(outage_data_dist(snr.rho_bar[static_cast<std::size_t>(i)], k, radio));
    out.p_up.push_back(outage_local_update_oma(snr.eta_bar[static_cast<std::size_t>(i)], k, radio));
  }
  out.p_mul = outage_multicast(snr, radio);
  return out;
}

}  // namespace edgesim

#include "edgesim/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "edgesim/parallel.hpp"
#include "edgesim/retransmission.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_interval(double v, const char* what) {
  if (!(v > 0.0) || !(v < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
  }
}
}  // namespace

void SystemConfig::validate() const {
  if (n_total < 1) throw std::invalid_argument("n_total must be >= 1");
  if (k_devices < 1) throw std::invalid_argument("k_devices must be >= 1");
  radio.validate();
  snr.validate();
  const auto k = static_cast<std::size_t>(k_devices);
  if (snr.rho_bar.size() != k || compute_consts.size() != k || partition_sizes.size() != k) {
    throw std::invalid_argument("snr, compute_consts, partition_sizes must all have length K");
  }
  if (!(slot_seconds > 0.0)) throw std::invalid_argument("slot_seconds must be positive");
  require_unit_interval(eps_local, "eps_local");
  require_unit_interval(eps_gap, "eps_gap");
  if (!(lambda_reg > 0.0)) throw std::invalid_argument("lambda_reg must be positive");
  if (!(mu_smooth > 0.0)) throw std::invalid_argument("mu_smooth must be positive");
  if (!(zeta_convex > 0.0)) throw std::invalid_argument("zeta_convex must be positive");
  for (double c : compute_consts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("compute_consts must be finite and >= 0");
  }
  long total = 0;
  for (long n : partition_sizes) {
    if (n < 0) throw std::invalid_argument("partition sizes must be >= 0");
    total += n;
  }
  if (total != n_total) throw std::invalid_argument("partition sizes must sum to n_total");
  if (sigma_product && !(*sigma_product >= 0.0)) {
    throw std::invalid_argument("sigma_product must be >= 0");
  }
}

double SystemConfig::effective_sigma_product() const {
  if (sigma_product) return *sigma_product;
  return static_cast<double>(n_total) / static_cast<double>(k_devices);
}

double SystemConfig::max_partition() const {
  long m = 0;
  for (long n : partition_sizes) m = std::max(m, n);
  return static_cast<double>(m);
}

double SystemConfig::max_compute_load() const {
  double m = 0.0;
  for (std::size_t i = 0; i < partition_sizes.size(); ++i) {
    m = std::max(m, compute_consts[i] * static_cast<double>(partition_sizes[i]));
  }
  return m;
}

long global_iterations(const SystemConfig& cfg, bool* degenerate) {
  cfg.validate();
  if (degenerate) *degenerate = false;
  const double a = cfg.mu_smooth * cfg.zeta_convex * cfg.lambda_reg * static_cast<double>(cfg.n_total);
  const double s = cfg.effective_sigma_product();
  const double k = static_cast<double>(cfg.k_devices);
  const double factor = k / (1.0 - cfg.eps_local) * (a + s) / a;
  const double log_arg = (a + s) / ((1.0 - cfg.eps_local) * a) * k / cfg.eps_gap;
  const double m = factor * std::log(log_arg);
  if (!(m > 0.0)) {
    if (degenerate) *degenerate = true;
    return 1;
  }
  return static_cast<long>(std::ceil(m));
}

double local_compute_time(double c_k, long n_k, double eps_local) {
  if (!(c_k >= 0.0) || n_k < 0) throw std::domain_error("compute constant and size must be >= 0");
  if (!(eps_local > 0.0)) throw std::domain_error("eps_local = 0 diverges");
  return c_k * static_cast<double>(n_k) / eps_local;
}

namespace {

struct ExtremeOutages {
  double p_dist_worst, p_dist_best;
  double p_up_worst, p_up_best;
  double p_mul_worst, p_mul_best;
};

ExtremeOutages extreme_outages(const SystemConfig& cfg) {
  const auto [rho_min_it, rho_max_it] = std::minmax_element(cfg.snr.rho_bar.begin(), cfg.snr.rho_bar.end());
  const auto [eta_min_it, eta_max_it] = std::minmax_element(cfg.snr.eta_bar.begin(), cfg.snr.eta_bar.end());
  const int k = cfg.k_devices;
  ExtremeOutages e{};
  e.p_dist_worst = outage_data_dist(*rho_min_it, k, cfg.radio);
  e.p_dist_best = outage_data_dist(*rho_max_it, k, cfg.radio);
  e.p_up_worst = outage_local_update_oma(*eta_min_it, k, cfg.radio);
  e.p_up_best = outage_local_update_oma(*eta_max_it, k, cfg.radio);
  e.p_mul_worst = outage_multicast_extreme(*rho_min_it, k, cfg.radio, ExtremeSnr::worst);
  e.p_mul_best = outage_multicast_extreme(*rho_max_it, k, cfg.radio, ExtremeSnr::best);
  return e;
}

double bound_with(const SystemConfig& cfg, long m_k, double p_dist, double p_up, double p_mul) {
  if (certain_outage(p_dist) || certain_outage(p_up) || certain_outage(p_mul)) return kInf;
  const double w = cfg.slot_seconds;
  const double m = static_cast<double>(m_k);
  return w * cfg.max_partition() * expected_max_tx_iid(p_dist, cfg.k_devices) +
         m * cfg.max_compute_load() / cfg.eps_local +
         w * m * expected_max_tx_iid(p_up, cfg.k_devices) +
         w * m / (1.0 - p_mul);
}

}  // namespace

CompletionBounds completion_bounds(const SystemConfig& cfg) {
  cfg.validate();
  const long m_k = global_iterations(cfg);
  const ExtremeOutages e = extreme_outages(cfg);
  CompletionBounds b;
  b.lower_s = bound_with(cfg, m_k, e.p_dist_best, e.p_up_best, e.p_mul_best);
  b.upper_s = bound_with(cfg, m_k, e.p_dist_worst, e.p_up_worst, e.p_mul_worst);
  b.divergent = std::isinf(b.upper_s) || std::isinf(b.lower_s);
  return b;
}

namespace {

CompletionEstimate completion_mc_impl(const SystemConfig& cfg, const PhaseOutages& ph,
                                      long trials, std::uint64_t seed, bool parallel) {
  cfg.validate();
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  const auto k = static_cast<std::size_t>(cfg.k_devices);
  if (ph.p_dist.size() != k || ph.p_up.size() != k) {
    throw std::invalid_argument("phase outages must match K");
  }

  const long m_k = global_iterations(cfg);
  const CompletionBounds bounds = completion_bounds(cfg);

  CompletionEstimate est;
  est.trials = trials;
  est.iterations_m_k = m_k;
  est.lower_bound_s = bounds.lower_s;
  est.upper_bound_s = bounds.upper_s;

  bool divergent = false;
  for (double p : ph.p_dist) divergent |= certain_outage(p);
  for (double p : ph.p_up) divergent |= certain_outage(p);
  divergent |= certain_outage(ph.p_mul);
  if (divergent) {
    est.divergent = true;
    est.mean_s = kInf;
    est.stderr_s = 0.0;
    return est;
  }

  std::vector<double> log_p_dist(k), log_p_up(k);
  for (std::size_t i = 0; i < k; ++i) {
    log_p_dist[i] = std::log(ph.p_dist[i]);
    log_p_up[i] = std::log(ph.p_up[i]);
  }
  const double log_p_mul = std::log(ph.p_mul);

  double t_local = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    t_local = std::max(t_local, local_compute_time(cfg.compute_consts[i], cfg.partition_sizes[i], cfg.eps_local));
  }
  const double w = cfg.slot_seconds;

  auto geometric = [](Rng& rng, double log_p) {
    const double l = std::floor(std::log1p(-rng.uniform01()) / log_p) + 1.0;
    return l < 1.0 ? 1.0 : l;
  };

  auto one_trial = [&](long t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    // Data distribution: one phase at the very beginning.
    double dist_slots = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto n_i = static_cast<double>(cfg.partition_sizes[i]);
      if (n_i == 0.0) continue;
      double slots;
      if (cfg.per_example_dist) {
        slots = 0.0;
        for (long e = 0; e < cfg.partition_sizes[i]; ++e) slots += geometric(rng, log_p_dist[i]);
      } else {
        slots = n_i * geometric(rng, log_p_dist[i]);
      }
      dist_slots = std::max(dist_slots, slots);
    }
    // M_K global iterations with fresh draws each round.
    double iter_slots = 0.0;
    for (long m = 0; m < m_k; ++m) {
      double up_max = 0.0;
      for (std::size_t i = 0; i < k; ++i) up_max = std::max(up_max, geometric(rng, log_p_up[i]));
      iter_slots += up_max + geometric(rng, log_p_mul);
    }
    return w * dist_slots + static_cast<double>(m_k) * t_local + w * iter_slots;
  };

  const MeanVar mv = parallel ? block_mean_var(trials, one_trial)
                              : block_mean_var_serial(trials, one_trial);
  est.mean_s = mv.mean;
  est.stderr_s = mv.std_error();
  return est;
}

}  // namespace

CompletionEstimate avg_completion_mc(const SystemConfig& cfg, long trials, std::uint64_t seed) {
  return completion_mc_impl(cfg, phase_outages_oma(cfg.snr, cfg.radio), trials, seed, true);
}

CompletionEstimate avg_completion_mc_with(const SystemConfig& cfg, const PhaseOutages& outages,
                                          long trials, std::uint64_t seed) {
  return completion_mc_impl(cfg, outages, trials, seed, true);
}

CompletionEstimate avg_completion_mc_serial(const SystemConfig& cfg, long trials, std::uint64_t seed) {
  return completion_mc_impl(cfg, phase_outages_oma(cfg.snr, cfg.radio), trials, seed, false);
}

double centralized_time(double c, long n_total, double eps_gap) {
  if (!(c > 0.0) || n_total < 1) throw std::domain_error("c and n_total must be positive");
  if (!(eps_gap > 0.0)) throw std::domain_error("eps_gap = 0 diverges");
  return c * static_cast<double>(n_total) / eps_gap;
}

double large_data_upper(const SystemConfig& cfg) {
  cfg.validate();
  const double rho_min = *std::min_element(cfg.snr.rho_bar.begin(), cfg.snr.rho_bar.end());
  const double p_dist_max = outage_data_dist(rho_min, cfg.k_devices, cfg.radio);
  if (certain_outage(p_dist_max)) return kInf;
  const long m_k = global_iterations(cfg);
  return cfg.slot_seconds * static_cast<double>(cfg.n_total) / (1.0 - p_dist_max) +
         static_cast<double>(m_k) * cfg.max_compute_load() / cfg.eps_local;
}

}  // namespace edgesim

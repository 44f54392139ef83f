#include "edgesim/retransmission.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

void require_convergent(double p) {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::domain_error("outage probability must lie in [0, 1); expected count diverges at 1");
  }
}

// Smallest L >= 1 with 1 - p^L > u, given log_p = ln(p). log_p = -inf
// (p = 0) falls out naturally as L = 1.
long geometric_from_uniform(double u, double log_p) {
  const double l = std::floor(std::log1p(-u) / log_p) + 1.0;
  return l < 1.0 ? 1L : static_cast<long>(l);
}

}  // namespace

void TxCountModel::validate() const { require_convergent(p); }

double geometric_pmf(const TxCountModel& model, long l) {
  model.validate();
  if (l < 1) throw std::domain_error("transmission count starts at 1");
  if (model.p == 0.0) return l == 1 ? 1.0 : 0.0;
  return std::pow(model.p, static_cast<double>(l - 1)) * (1.0 - model.p);
}

long sample_tx_count(const TxCountModel& model, double uniform_draw) {
  model.validate();
  if (!(uniform_draw >= 0.0) || !(uniform_draw < 1.0)) {
    throw std::domain_error("uniform_draw must lie in [0, 1)");
  }
  if (model.p == 0.0) return 1;
  return geometric_from_uniform(uniform_draw, std::log(model.p));
}

double expected_max_tx_iid(double p, int k_devices) {
  require_convergent(p);
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  if (p == 0.0) return 1.0;

  // Near-certain outage: the geometric maximum converges to the scaled
  // exponential maximum, whose mean is H_k / (-ln p). Keeps the evaluation
  // O(1) where the direct sum would need ~1/(1-p) terms, and stays inside
  // the Lemma-1 sandwich since 1 <= H_k <= k.
  if (p > 1.0 - 1e-6) {
    double harmonic = 0.0;
    for (int q = 1; q <= k_devices; ++q) harmonic += 1.0 / static_cast<double>(q);
    return harmonic / -std::log(p) + 0.5;
  }

  const double log_p = std::log(p);
  const double k = static_cast<double>(k_devices);
  double total = 0.0;
  for (long l = 0;; ++l) {
    const double p_l = std::exp(log_p * static_cast<double>(l));
    const double term = l == 0 ? 1.0 : -std::expm1(k * std::log1p(-p_l));
    total += term;
    if (l > 0 && term < 1e-12) break;
  }
  return total;
}

double expected_max_tx_series(double p, int k_devices) {
  require_convergent(p);
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  double sum = 0.0;
  double binom = 1.0;
  for (int q = 1; q <= k_devices; ++q) {
    binom *= static_cast<double>(k_devices - q + 1) / static_cast<double>(q);
    const double sign = (q % 2 == 1) ? 1.0 : -1.0;
    sum += sign * binom / (1.0 - std::pow(p, static_cast<double>(q)));
  }
  return sum;
}

TxBounds expected_max_tx_bounds(double p, int k_devices) {
  require_convergent(p);
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  return {1.0 / (1.0 - p), static_cast<double>(k_devices) / (1.0 - p)};
}

namespace {

MeanVar weighted_tx_mc_impl(const std::vector<double>& outages,
                            const std::vector<double>& weights, long trials,
                            std::uint64_t seed, bool parallel) {
  if (outages.size() != weights.size() || outages.empty()) {
    throw std::invalid_argument("outages and weights must be non-empty and equal length");
  }
  for (double p : outages) require_convergent(p);
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and positive");
    }
  }
  if (trials < 1) throw std::domain_error("trials must be >= 1");

  std::vector<double> log_p(outages.size());
  for (std::size_t i = 0; i < outages.size(); ++i) log_p[i] = std::log(outages[i]);

  auto one_trial = [&](long t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    double best = 0.0;
    for (std::size_t i = 0; i < outages.size(); ++i) {
      const long l = geometric_from_uniform(rng.uniform01(), log_p[i]);
      best = std::max(best, weights[i] * static_cast<double>(l));
    }
    return best;
  };
  return parallel ? block_mean_var(trials, one_trial)
                  : block_mean_var_serial(trials, one_trial);
}

}  // namespace

MeanVar expected_max_weighted_tx_mc(const std::vector<double>& outages,
                                    const std::vector<double>& weights,
                                    long trials, std::uint64_t seed) {
  return weighted_tx_mc_impl(outages, weights, trials, seed, true);
}

MeanVar expected_max_weighted_tx_mc_serial(const std::vector<double>& outages,
                                           const std::vector<double>& weights,
                                           long trials, std::uint64_t seed) {
  return weighted_tx_mc_impl(outages, weights, trials, seed, false);
}

}  // namespace edgesim

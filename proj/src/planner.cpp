#include "edgesim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

std::vector<double> spaced_db(double lo_linear, double hi_linear, int n) {
  const double lo_db = linear_to_db(lo_linear);
  const double hi_db = linear_to_db(hi_linear);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out[static_cast<std::size_t>(i)] = db_to_linear(lo_db + f * (hi_db - lo_db));
  }
  return out;
}

std::vector<double> spaced_log(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
  }
  return out;
}

std::vector<long> uniform_sizes(long n_total, int k) {
  std::vector<long> sizes(static_cast<std::size_t>(k), n_total / k);
  for (long i = 0; i < n_total % k; ++i) ++sizes[static_cast<std::size_t>(i)];
  return sizes;
}

double planner_compute_const(const SystemConfig& cfg) {
  return *std::min_element(cfg.compute_consts.begin(), cfg.compute_consts.end());
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Decreases: return "Decreases";
    case Verdict::Increases: return "Increases";
    default: return "Indeterminate";
  }
}

SystemConfig resize_uniform(const SystemConfig& cfg, int new_k) {
  if (new_k < 1) throw std::domain_error("new_k must be >= 1");
  SystemConfig out = cfg;
  out.k_devices = new_k;
  const auto [rho_lo, rho_hi] = std::minmax_element(cfg.snr.rho_bar.begin(), cfg.snr.rho_bar.end());
  const auto [eta_lo, eta_hi] = std::minmax_element(cfg.snr.eta_bar.begin(), cfg.snr.eta_bar.end());
  const auto [c_lo, c_hi] = std::minmax_element(cfg.compute_consts.begin(), cfg.compute_consts.end());
  out.snr.rho_bar = spaced_db(*rho_lo, *rho_hi, new_k);
  out.snr.eta_bar = spaced_db(*eta_lo, *eta_hi, new_k);
  out.compute_consts = *c_lo > 0.0 ? spaced_log(*c_lo, *c_hi, new_k)
                                   : std::vector<double>(static_cast<std::size_t>(new_k), *c_lo);
  out.partition_sizes = uniform_sizes(cfg.n_total, new_k);
  out.sigma_product = cfg.sigma_product;  // empty stays the N/K default
  return out;
}

AdditionVerdict addition_verdict(const SystemConfig& cfg) {
  cfg.validate();
  const CompletionBounds at_k = completion_bounds(cfg);
  const CompletionBounds at_k1 = completion_bounds(resize_uniform(cfg, cfg.k_devices + 1));

  AdditionVerdict out;
  if (at_k.divergent || at_k1.divergent) {
    out.verdict = Verdict::Indeterminate;
    out.divergent = true;
    out.margin_s = kInf;
    return out;
  }
  const double decrease_test = at_k1.upper_s - at_k.lower_s;  // <= 0 certifies a decrease
  const double increase_test = at_k1.lower_s - at_k.upper_s;  // >= 0 certifies an increase
  if (decrease_test <= 0.0) {
    out.verdict = Verdict::Decreases;
    out.margin_s = -decrease_test;
  } else if (increase_test >= 0.0) {
    out.verdict = Verdict::Increases;
    out.margin_s = increase_test;
  } else {
    out.verdict = Verdict::Indeterminate;
    out.margin_s = std::min(decrease_test, -increase_test);
  }
  return out;
}

ConditionCheck high_accuracy_condition(int k_devices, double eta_max, double eta_min,
                                       double rho_max, double rho_min,
                                       const RadioConfig& radio, double c,
                                       long n_total, double eps_local,
                                       Prop3Variant variant) {
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  if (!(eta_max > 0.0) || !(eta_min > 0.0) || !(rho_max > 0.0) || !(rho_min > 0.0)) {
    throw std::domain_error("mean SNRs must be positive");
  }
  radio.validate();
  const double k = static_cast<double>(k_devices);
  const double up_scale = variant == Prop3Variant::proof ? k : 1.0;
  const double up_thr_k1 = std::exp2((k + 1.0) * radio.rate_up_bps / radio.bandwidth_hz) - 1.0;
  const double up_thr_k = std::exp2(k * radio.rate_up_bps / radio.bandwidth_hz) - 1.0;
  const double mul_thr = std::exp2(radio.rate_mul_bps / radio.bandwidth_hz) - 1.0;

  ConditionCheck out;
  out.lhs = std::exp(up_thr_k1 / (up_scale * eta_max)) +
            std::exp((k + 1.0) * mul_thr / rho_max) -
            k * std::exp(up_thr_k / (up_scale * eta_min)) -
            std::exp(k * mul_thr / rho_min);
  out.rhs = c * static_cast<double>(n_total) / (eps_local * k * (k + 1.0));
  out.holds = out.lhs >= out.rhs;
  return out;
}

double stationarity_residual(double k_real, const SystemConfig& cfg) {
  cfg.validate();
  if (!(k_real > 0.0)) throw std::domain_error("K must be positive");
  const double w = cfg.slot_seconds;
  const double n = static_cast<double>(cfg.n_total);
  const double c = planner_compute_const(cfg);
  const double lam = cfg.lambda_reg;
  const double el = cfg.eps_local;
  const double eg = cfg.eps_gap;
  const double rho_min = *std::min_element(cfg.snr.rho_bar.begin(), cfg.snr.rho_bar.end());
  const double rd_over_b = cfg.radio.rate_dist_bps / cfg.radio.bandwidth_hz;

  const double pow2 = std::exp2(k_real * rd_over_b);
  const double comm = w * n * (rd_over_b * kLn2 / rho_min) * pow2 * std::exp((pow2 - 1.0) / rho_min);
  const double comp_log = (c * n / ((1.0 - el) * el * lam)) * (1.0 / (k_real * k_real)) *
                          std::log((lam * k_real + 1.0) / ((1.0 - el) * eg * lam));
  const double comp_lin = (c * n / ((1.0 - el) * el)) * (1.0 / k_real);
  return comm - comp_log + comp_lin;
}

double q_of_k(int k_devices, const SystemConfig& cfg) {
  cfg.validate();
  if (k_devices < 1) throw std::domain_error("k_devices must be >= 1");
  const double k = static_cast<double>(k_devices);
  const double c = planner_compute_const(cfg);
  const double lam = cfg.lambda_reg;
  const double el = cfg.eps_local;
  const double eg = cfg.eps_gap;
  const double rd = cfg.radio.rate_dist_bps;
  const double b = cfg.radio.bandwidth_hz;

  const double damp = std::exp2(-k * rd / b);
  const double bracket = (1.0 / (lam * k)) * std::log((lam * k + 1.0) / (lam * (1.0 - el) * eg)) - 1.0;
  const double arg = (c * b / (el * (1.0 - el) * rd * kLn2)) * damp * (1.0 / k) * bracket;
  if (!(arg > 0.0)) return -kInf;  // vacuous: any positive SNR satisfies the condition
  return damp * std::log(arg);
}

bool necessary_condition_holds(int k_devices, double rho_min, const SystemConfig& cfg) {
  if (!(rho_min > 0.0)) throw std::domain_error("rho_min must be positive");
  const double q = q_of_k(k_devices, cfg);
  return 1.0 / rho_min >= q;
}

OptimalKResult optimal_k_search(const SystemConfig& cfg_template, int k_max,
                                long trials, std::uint64_t seed) {
  cfg_template.validate();
  if (k_max < 1) throw std::domain_error("k_max must be >= 1");
  if (trials < 1) throw std::domain_error("trials must be >= 1");

  OptimalKResult result;
  result.table.reserve(static_cast<std::size_t>(k_max));
  int best_k = 0;
  double best_mean = kInf;
  for (int k = 1; k <= k_max; ++k) {
    const SystemConfig cfg = resize_uniform(cfg_template, k);
    const CompletionEstimate est =
        avg_completion_mc(cfg, trials, mix_seed(seed, static_cast<std::uint64_t>(k)));
    result.table.push_back({k, est.mean_s, est.stderr_s, est.lower_bound_s, est.upper_bound_s,
                            est.iterations_m_k});
    if (est.mean_s < best_mean) {
      best_mean = est.mean_s;
      best_k = k;
    }
  }
  if (best_k == 0) throw std::runtime_error("optimal_k_search: every K diverges");
  result.k_star = best_k;
  return result;
}

}  // namespace edgesim

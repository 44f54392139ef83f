#ifndef EDGESIM_EXPERIMENTS_HPP
#define EDGESIM_EXPERIMENTS_HPP

#include <ostream>
#include <string>

#include "edgesim/config.hpp"

namespace edgesim {

/// Floats printed with 9 significant digits; the fixed formatting is what
/// makes rerun output byte-identical.
std::string format_g9(double v);

/// K, mc_mean_s, mc_stderr_s, lower_s, upper_s, m_k over the configured K
/// range. Per-K seeds derive from the master seed.
void run_sweep_k(const ExperimentConfig& cfg, std::ostream& out);

/// Closed-form side only: K, lower_s, upper_s, large_data_upper_s, m_k.
void run_bounds(const ExperimentConfig& cfg, std::ostream& out);

/// rho_min_db, bandwidth_hz, k_star rows over the SNR grid (and bandwidth
/// grid when configured). Each grid point shifts the SNR intervals to start
/// at the grid value, keeping the configured dB spread.
void run_optimal_k_vs_snr(const ExperimentConfig& cfg, std::ostream& out);

/// K, mean_oma_s, mean_noma_s: the NOMA column replaces the upload-phase
/// outages with their Monte-Carlo estimates under SIC decoding.
void run_oma_vs_noma(const ExperimentConfig& cfg, std::ostream& out);

/// k, t, duality_gap, accuracy rows for each configured K plus a
/// centralized baseline row set (k = 0) run to gap 1e-6.
void run_train(const ExperimentConfig& cfg, std::ostream& out);

/// K, verdict, prop3_holds, q_of_k, necessary_holds, stationarity_residual.
void run_planner_report(const ExperimentConfig& cfg, std::ostream& out);

/// n_total, centralized_s, distributed_best_s, k_star over the N grid.
void run_centralized(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace edgesim

#endif

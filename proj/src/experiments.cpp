#include "edgesim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "edgesim/planner.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

// Stream-wide seed salts, one per subcommand, so sweeps do not share trial
// streams with each other.
constexpr std::uint64_t kSaltSweep = 0x1001;
constexpr std::uint64_t kSaltOma = 0x2001;
constexpr std::uint64_t kSaltNomaEst = 0x2002;
constexpr std::uint64_t kSaltNomaRun = 0x2003;
constexpr std::uint64_t kSaltOptimal = 0x3001;
constexpr std::uint64_t kSaltCentral = 0x4001;

ExperimentConfig shifted_snr(const ExperimentConfig& cfg, double new_min_db) {
  ExperimentConfig out = cfg;
  const double rho_spread = cfg.rho_max_db - cfg.rho_min_db;
  const double eta_spread = cfg.eta_max_db - cfg.eta_min_db;
  out.rho_min_db = new_min_db;
  out.rho_max_db = new_min_db + rho_spread;
  out.eta_min_db = new_min_db;
  out.eta_max_db = new_min_db + eta_spread;
  return out;
}

}  // namespace

void run_sweep_k(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << "k,mc_mean_s,mc_stderr_s,lower_s,upper_s,m_k\n";
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const SystemConfig sys = make_system_config(cfg, k);
    const CompletionEstimate est =
        avg_completion_mc(sys, cfg.trials, mix_seed(cfg.seed, kSaltSweep + static_cast<std::uint64_t>(k)));
    out << k << ',' << format_g9(est.mean_s) << ',' << format_g9(est.stderr_s) << ','
        << format_g9(est.lower_bound_s) << ',' << format_g9(est.upper_bound_s) << ','
        << est.iterations_m_k << '\n';
  }
}

void run_bounds(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << "k,lower_s,upper_s,large_data_upper_s,m_k\n";
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const SystemConfig sys = make_system_config(cfg, k);
    const CompletionBounds b = completion_bounds(sys);
    out << k << ',' << format_g9(b.lower_s) << ',' << format_g9(b.upper_s) << ','
        << format_g9(large_data_upper(sys)) << ',' << global_iterations(sys) << '\n';
  }
}

void run_optimal_k_vs_snr(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.snr_grid_db.empty()) throw std::runtime_error("optimal-k: empty SNR grid");
  std::vector<double> bandwidths = cfg.bandwidth_grid_hz;
  if (bandwidths.empty()) bandwidths.push_back(cfg.bandwidth_hz);

  out << "rho_min_db,bandwidth_hz,k_star\n";
  for (double bw : bandwidths) {
    for (std::size_t g = 0; g < cfg.snr_grid_db.size(); ++g) {
      ExperimentConfig point = shifted_snr(cfg, cfg.snr_grid_db[g]);
      point.bandwidth_hz = bw;
      const SystemConfig tmpl = make_system_config(point, std::max(2, point.k_min + 1));
      const OptimalKResult res = optimal_k_search(
          tmpl, point.k_max, point.trials,
          mix_seed(cfg.seed, kSaltOptimal + (static_cast<std::uint64_t>(g) << 8) +
                                 static_cast<std::uint64_t>(bw)));
      out << format_g9(cfg.snr_grid_db[g]) << ',' << format_g9(bw) << ',' << res.k_star << '\n';
    }
  }
}

void run_oma_vs_noma(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << "k,mean_oma_s,mean_noma_s\n";
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const SystemConfig sys = make_system_config(cfg, k);
    const CompletionEstimate oma =
        avg_completion_mc(sys, cfg.trials, mix_seed(cfg.seed, kSaltOma + static_cast<std::uint64_t>(k)));

    PhaseOutages ph = phase_outages_oma(sys.snr, sys.radio);
    ph.p_up = outage_local_update_noma(sys.snr, sys.radio, cfg.noma_trials,
                                       mix_seed(cfg.seed, kSaltNomaEst + static_cast<std::uint64_t>(k)));
    const CompletionEstimate noma = avg_completion_mc_with(
        sys, ph, cfg.trials, mix_seed(cfg.seed, kSaltNomaRun + static_cast<std::uint64_t>(k)));

    out << k << ',' << format_g9(oma.mean_s) << ',' << format_g9(noma.mean_s) << '\n';
  }
}

void run_train(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.dataset_path.empty()) throw std::runtime_error("train: config has no dataset path");
  const Dataset data = load_dataset(cfg.dataset_path, cfg.normalize_features);
  const LossKit kit = LossKit::logistic();

  TrainOptions opts;
  opts.partition = cfg.partition;
  opts.sigma_mode = cfg.sigma_mode == "estimate" ? SigmaPrimeMode::estimate
                                                 : SigmaPrimeMode::safe_bound;

  out << "k,t,duality_gap,accuracy\n";
  auto emit = [&](int k_label, const TrainTrace& trace) {
    for (const TraceRow& row : trace.rows) {
      out << k_label << ',' << row.t << ',' << format_g9(row.gap) << ','
          << format_g9(row.accuracy) << '\n';
    }
  };
  // Centralized baseline: K = 1 dual ascent run to a tight gap, labeled k=0.
  const TrainTrace central = train(data, 1, kit, cfg.lambda, cfg.eps_local, 1e-6, cfg.gamma,
                                   cfg.seed, cfg.max_train_iters * 10, opts);
  emit(0, central);
  for (int k : cfg.train_k) {
    const TrainTrace trace = train(data, k, kit, cfg.lambda, cfg.eps_local, cfg.eps_gap,
                                   cfg.gamma, cfg.seed, cfg.max_train_iters, opts);
    emit(k, trace);
  }
}

void run_planner_report(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << "k,verdict,prop3_holds,q_of_k,necessary_holds,stationarity_residual\n";
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const SystemConfig sys = make_system_config(cfg, k);
    const AdditionVerdict verdict = addition_verdict(sys);
    const ConditionCheck prop3 = high_accuracy_condition(
        k, db_to_linear(cfg.eta_max_db), db_to_linear(cfg.eta_min_db),
        db_to_linear(cfg.rho_max_db), db_to_linear(cfg.rho_min_db), sys.radio, cfg.c_min,
        cfg.n_total, cfg.eps_local);
    const double q = q_of_k(k, sys);
    const bool nec = necessary_condition_holds(k, db_to_linear(cfg.rho_min_db), sys);
    out << k << ',' << to_string(verdict.verdict) << ',' << (prop3.holds ? "true" : "false")
        << ',' << format_g9(q) << ',' << (nec ? "true" : "false") << ','
        << format_g9(stationarity_residual(static_cast<double>(k), sys)) << '\n';
  }
}

void run_centralized(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << "n_total,centralized_s,distributed_best_s,k_star\n";
  for (std::size_t i = 0; i < cfg.centralized_n_grid.size(); ++i) {
    ExperimentConfig point = cfg;
    point.n_total = cfg.centralized_n_grid[i];
    const SystemConfig tmpl = make_system_config(point, std::max(2, point.k_min + 1));
    const OptimalKResult res =
        optimal_k_search(tmpl, point.k_max, point.trials,
                         mix_seed(cfg.seed, kSaltCentral + static_cast<std::uint64_t>(i)));
    double best = res.table[static_cast<std::size_t>(res.k_star - 1)].mean_s;
    out << point.n_total << ',' << format_g9(centralized_time(cfg.c_min, point.n_total, cfg.eps_gap))
        << ',' << format_g9(best) << ',' << res.k_star << '\n';
  }
}

}  // namespace edgesim

#ifndef EDGESIM_CONFIG_HPP
#define EDGESIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/cocoa.hpp"
#include "edgesim/completion.hpp"

namespace edgesim {

enum class AccessMode { oma, noma };

/// Sweep-level configuration. Defaults reproduce the reference operating
/// point: eps_l = eps_G = 0.001, mu = zeta = 1, lambda = 0.01, B = 20 MHz,
/// all rates 5 Mbit/s, omega = 1 ms, SNR ranges [10, 20] dB, compute
/// constants spanning [1e-10, 1e-9].
struct ExperimentConfig {
  long n_total = 4600;
  int k_min = 1;
  int k_max = 30;
  double bandwidth_hz = 20e6;
  double rate_dist_bps = 5e6;
  double rate_up_bps = 5e6;
  double rate_mul_bps = 5e6;
  double slot_seconds = 1e-3;
  double eps_local = 1e-3;
  double eps_gap = 1e-3;
  double mu = 1.0;
  double zeta = 1.0;
  double lambda = 1e-2;
  double rho_min_db = 10.0;
  double rho_max_db = 20.0;
  double eta_min_db = 10.0;
  double eta_max_db = 20.0;
  double c_min = 1e-10;
  double c_max = 1e-9;
  std::string c_spacing = "log";  // or "linear"
  long trials = 10000;
  std::uint64_t seed = 12345;
  AccessMode access = AccessMode::oma;
  PartitionMode partition = PartitionMode::uniform;
  std::string dataset_path;
  std::string out_path;
  double gamma = 1.0;
  std::string sigma_mode = "safe";  // or "estimate"
  long noma_trials = 200000;
  long max_train_iters = 200;
  std::vector<int> train_k = {5, 10};
  std::vector<double> snr_grid_db = {5.0, 15.0, 25.0};
  std::vector<double> bandwidth_grid_hz;       // empty: just bandwidth_hz
  std::vector<long> centralized_n_grid = {1000, 10000, 100000};
  bool per_example_dist = false;
  bool normalize_features = true;

  void validate() const;
};

/// Parses a flat `key = value` text file ('#' starts a comment). Unset keys
/// keep their defaults; unknown keys and malformed lines are errors naming
/// the key or line number.
ExperimentConfig parse_config(const std::string& path);

/// Applies one `key = value` assignment (the parser's core, exposed for
/// tests and CLI overrides).
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Realizes the scalar sweep config at a specific device count: SNR profiles
/// equally spaced in dB across their ranges, compute constants spaced per
/// c_spacing, uniform (or seeded random) partition sizes.
SystemConfig make_system_config(const ExperimentConfig& exp, int k_devices);

/// Loads a CSV dataset: one example per row, numeric features, final column
/// the label. {0,1} labels map to {-1,+1}; columns (examples) are unit
/// normalized unless normalize_features is off.
Dataset load_dataset(const std::string& path, bool normalize = true);

}  // namespace edgesim

#endif

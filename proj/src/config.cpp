#include "edgesim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' has non-numeric value '" + v + "'");
  }
  if (pos != v.size()) {
    throw std::runtime_error("config: key '" + key + "' has trailing junk in '" + v + "'");
  }
  return out;
}

long parse_long(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d)) throw std::runtime_error("config: key '" + key + "' must be an integer");
  return static_cast<long>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("config: key '" + key + "' must be true/false");
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F&& one) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(one(key, item));
  }
  if (out.empty()) throw std::runtime_error("config: key '" + key + "' has an empty list");
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_total < 1) throw std::runtime_error("config: n_total must be >= 1");
  if (k_min < 1 || k_max < k_min) throw std::runtime_error("config: need 1 <= k_min <= k_max");
  if (trials < 1 || noma_trials < 1) throw std::runtime_error("config: trials must be >= 1");
  auto in_unit = [](double v, const char* what) {
    if (!(v > 0.0) || !(v < 1.0)) {
      throw std::runtime_error(std::string("config: ") + what + " must lie in (0, 1)");
    }
  };
  in_unit(eps_local, "eps_local");
  in_unit(eps_gap, "eps_gap");
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::runtime_error(std::string("config: ") + what + " must be positive");
    }
  };
  positive(bandwidth_hz, "bandwidth_hz");
  positive(rate_dist_bps, "rate_dist_bps");
  positive(rate_up_bps, "rate_up_bps");
  positive(rate_mul_bps, "rate_mul_bps");
  positive(slot_seconds, "slot_seconds");
  positive(lambda, "lambda");
  positive(mu, "mu");
  positive(zeta, "zeta");
  positive(c_min, "c_min");
  positive(c_max, "c_max");
  if (rho_min_db > rho_max_db || eta_min_db > eta_max_db || c_min > c_max) {
    throw std::runtime_error("config: ranges must satisfy min <= max");
  }
  if (c_spacing != "log" && c_spacing != "linear") {
    throw std::runtime_error("config: c_spacing must be log or linear");
  }
  if (sigma_mode != "safe" && sigma_mode != "estimate") {
    throw std::runtime_error("config: sigma_mode must be safe or estimate");
  }
  if (!(gamma > 0.0) || gamma > 1.0) throw std::runtime_error("config: gamma must lie in (0, 1]");
  for (int k : train_k) {
    if (k < 1) throw std::runtime_error("config: train_k entries must be >= 1");
  }
  if (max_train_iters < 1) throw std::runtime_error("config: max_train_iters must be >= 1");
}

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "n_total") cfg.n_total = parse_long(key, value);
  else if (key == "k_min") cfg.k_min = static_cast<int>(parse_long(key, value));
  else if (key == "k_max") cfg.k_max = static_cast<int>(parse_long(key, value));
  else if (key == "bandwidth_hz") cfg.bandwidth_hz = parse_double(key, value);
  else if (key == "rate_dist_bps") cfg.rate_dist_bps = parse_double(key, value);
  else if (key == "rate_up_bps") cfg.rate_up_bps = parse_double(key, value);
  else if (key == "rate_mul_bps") cfg.rate_mul_bps = parse_double(key, value);
  else if (key == "slot_seconds") cfg.slot_seconds = parse_double(key, value);
  else if (key == "eps_local") cfg.eps_local = parse_double(key, value);
  else if (key == "eps_gap") cfg.eps_gap = parse_double(key, value);
  else if (key == "mu") cfg.mu = parse_double(key, value);
  else if (key == "zeta") cfg.zeta = parse_double(key, value);
  else if (key == "lambda") cfg.lambda = parse_double(key, value);
  else if (key == "rho_min_db") cfg.rho_min_db = parse_double(key, value);
  else if (key == "rho_max_db") cfg.rho_max_db = parse_double(key, value);
  else if (key == "eta_min_db") cfg.eta_min_db = parse_double(key, value);
  else if (key == "eta_max_db") cfg.eta_max_db = parse_double(key, value);
  else if (key == "c_min") cfg.c_min = parse_double(key, value);
  else if (key == "c_max") cfg.c_max = parse_double(key, value);
  else if (key == "c_spacing") cfg.c_spacing = value;
  else if (key == "trials") cfg.trials = parse_long(key, value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
  else if (key == "access") {
    if (value == "oma") cfg.access = AccessMode::oma;
    else if (value == "noma") cfg.access = AccessMode::noma;
    else throw std::runtime_error("config: access must be oma or noma");
  } else if (key == "partition") {
    if (value == "uniform") cfg.partition = PartitionMode::uniform;
    else if (value == "random") cfg.partition = PartitionMode::random;
    else throw std::runtime_error("config: partition must be uniform or random");
  }
  else if (key == "dataset") cfg.dataset_path = value;
  else if (key == "out") cfg.out_path = value;
  else if (key == "gamma") cfg.gamma = parse_double(key, value);
  else if (key == "sigma_mode") cfg.sigma_mode = value;
  else if (key == "noma_trials") cfg.noma_trials = parse_long(key, value);
  else if (key == "max_train_iters") cfg.max_train_iters = parse_long(key, value);
  else if (key == "train_k") {
    cfg.train_k.clear();
    for (long v : parse_list<long>(key, value, parse_long)) cfg.train_k.push_back(static_cast<int>(v));
  }
  else if (key == "snr_grid_db") cfg.snr_grid_db = parse_list<double>(key, value, parse_double);
  else if (key == "bandwidth_grid_hz") cfg.bandwidth_grid_hz = parse_list<double>(key, value, parse_double);
  else if (key == "centralized_n_grid") cfg.centralized_n_grid = parse_list<long>(key, value, parse_long);
  else if (key == "per_example_dist") cfg.per_example_dist = parse_bool(key, value);
  else if (key == "normalize_features") cfg.normalize_features = parse_bool(key, value);
  else throw std::runtime_error("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: malformed line " + std::to_string(line_no) +
                               " (expected key = value)");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::runtime_error("config: malformed line " + std::to_string(line_no) +
                               " (empty key or value)");
    }
    apply_config_line(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

SystemConfig make_system_config(const ExperimentConfig& exp, int k_devices) {
  exp.validate();
  if (k_devices < 1) throw std::runtime_error("k_devices must be >= 1");
  const auto k = static_cast<std::size_t>(k_devices);

  SystemConfig cfg;
  cfg.n_total = exp.n_total;
  cfg.k_devices = k_devices;
  cfg.radio = {exp.bandwidth_hz, exp.rate_dist_bps, exp.rate_up_bps, exp.rate_mul_bps};
  cfg.slot_seconds = exp.slot_seconds;
  cfg.eps_local = exp.eps_local;
  cfg.eps_gap = exp.eps_gap;
  cfg.lambda_reg = exp.lambda;
  cfg.mu_smooth = exp.mu;
  cfg.zeta_convex = exp.zeta;
  cfg.per_example_dist = exp.per_example_dist;

  auto spaced = [&](double lo, double hi, bool log_scale) {
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double f = k > 1 ? static_cast<double>(i) / static_cast<double>(k - 1) : 0.0;
      out[i] = log_scale ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                         : lo + f * (hi - lo);
    }
    return out;
  };
  for (double db : spaced(exp.rho_min_db, exp.rho_max_db, false)) {
    cfg.snr.rho_bar.push_back(db_to_linear(db));
  }
  for (double db : spaced(exp.eta_min_db, exp.eta_max_db, false)) {
    cfg.snr.eta_bar.push_back(db_to_linear(db));
  }
  cfg.compute_consts = spaced(exp.c_min, exp.c_max, exp.c_spacing == "log");

  if (exp.partition == PartitionMode::uniform) {
    cfg.partition_sizes.assign(k, exp.n_total / k_devices);
    for (long i = 0; i < exp.n_total % k_devices; ++i) ++cfg.partition_sizes[static_cast<std::size_t>(i)];
  } else {
    const Partition part = partition_dataset(exp.n_total, k_devices, PartitionMode::random,
                                             mix_seed(exp.seed, 0x5000 + static_cast<std::uint64_t>(k_devices)));
    cfg.partition_sizes = part.sizes();
  }
  return cfg;
}

Dataset load_dataset(const std::string& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  long row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("dataset: non-numeric field at row " + std::to_string(row_no));
      }
      if (pos != cell.size() || !std::isfinite(v)) {
        throw std::runtime_error("dataset: bad field at row " + std::to_string(row_no));
      }
      row.push_back(v);
    }
    if (row.size() < 2) throw std::runtime_error("dataset: row " + std::to_string(row_no) + " needs features and a label");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("dataset: ragged row " + std::to_string(row_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset: no rows in '" + path + "'");

  Dataset data;
  data.n = static_cast<long>(rows.size());
  data.m = static_cast<long>(rows.front().size()) - 1;
  data.x.resize(static_cast<std::size_t>(data.m * data.n));
  data.y.resize(static_cast<std::size_t>(data.n));
  bool zero_one = true;
  for (long j = 0; j < data.n; ++j) {
    const auto& row = rows[static_cast<std::size_t>(j)];
    for (long i = 0; i < data.m; ++i) data.x[static_cast<std::size_t>(j * data.m + i)] = row[static_cast<std::size_t>(i)];
    const double label = row.back();
    data.y[static_cast<std::size_t>(j)] = label;
    if (label != 0.0 && label != 1.0) zero_one = false;
  }
  if (zero_one) {
    for (auto& y : data.y) y = y == 1.0 ? 1.0 : -1.0;
  }
  if (normalize) data.normalize_columns();
  data.validate();
  return data;
}

}  // namespace edgesim

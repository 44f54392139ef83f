// Command-line front end: each subcommand renders one CSV table from a flat
// key = value config file. Identical config and seed give byte-identical
// output.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "edgesim/experiments.hpp"

namespace {

using Runner = std::function<void(const edgesim::ExperimentConfig&, std::ostream&)>;

int run_one(const std::string& config_path, const std::string& seed_override,
            const std::string& out_override, const Runner& runner) {
  edgesim::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = edgesim::parse_config(config_path);
    if (!seed_override.empty()) edgesim::apply_config_line(cfg, "seed", seed_override);
    if (!out_override.empty()) edgesim::apply_config_line(cfg, "out", out_override);
    cfg.validate();

    std::ostringstream buffer;
    runner(cfg, buffer);

    if (cfg.out_path.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream out(cfg.out_path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write '" << cfg.out_path << "'\n";
        return 1;
      }
      out << buffer.str();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Completion-time simulator and planner for wireless distributed edge learning"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, Runner>> subcommands = {
      {"sweep-k", {"Monte-Carlo mean and bounds vs device count", edgesim::run_sweep_k}},
      {"bounds", {"closed-form bounds vs device count", edgesim::run_bounds}},
      {"optimal-k", {"optimal device count vs minimum SNR (and bandwidth)", edgesim::run_optimal_k_vs_snr}},
      {"oma-noma", {"OMA vs NOMA average completion time", edgesim::run_oma_vs_noma}},
      {"train", {"CoCoA training trace on a CSV dataset", edgesim::run_train}},
      {"planner", {"device-count decision table", edgesim::run_planner_report}},
      {"centralized", {"centralized baseline vs best distributed", edgesim::run_centralized}},
  };

  std::string config_path, seed_override, out_override;
  for (const auto& [name, entry] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--seed", seed_override, "master seed override");
    sub->add_option("--out", out_override, "output CSV path (default stdout)");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, entry] : subcommands) {
    if (app.got_subcommand(name)) {
      return run_one(config_path, seed_override, out_override, entry.second);
    }
  }
  return 1;
}

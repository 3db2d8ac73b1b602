// Command-line driver: single runs, the DoF ablation grid, and SNR sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfl/config.hpp"
#include "hfl/metrics.hpp"
#include "hfl/orchestrator.hpp"

namespace {

hfl::ExperimentConfig make_config(const std::string& config_path,
                                  std::optional<std::uint64_t> seed) {
  hfl::ExperimentConfig cfg =
      config_path.empty() ? hfl::ExperimentConfig{}.normalized() : hfl::load_config(config_path);
  if (seed) cfg.seed = *seed;
  cfg = cfg.normalized();
  cfg.validate();
  return cfg;
}

void write_run(const hfl::ExperimentConfig& cfg, const std::vector<hfl::RoundMetrics>& metrics,
               const std::string& path) {
  hfl::MetricsLog log;
  log.config_echo = hfl::config_echo(cfg);
  log.rounds = metrics;
  hfl::write_metrics_csv(log, path);
  std::cout << "wrote " << path << " (" << metrics.size() << " rounds, final accuracy "
            << (metrics.empty() ? 0.0 : metrics.back().accuracy) << ")\n";
}

// out.csv -> out_suffix.csv
std::string with_suffix(const std::string& out, const std::string& suffix) {
  const std::filesystem::path p(out);
  std::filesystem::path q = p.parent_path() / p.stem();
  return q.string() + "_" + suffix + (p.has_extension() ? p.extension().string() : ".csv");
}

std::string snr_tag(double snr_db) {
  std::ostringstream tag;
  tag << "snr" << snr_db << "db";
  std::string s = tag.str();
  for (char& c : s)
    if (c == '-') c = 'm';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid federated learning uplink simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path = "metrics.csv";
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file (key = value lines)");
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--out", out_path, "output CSV path");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run);

  CLI::App* ablation =
      app.add_subcommand("ablation", "run the {forward,reverse} x {opt,fix} grid");
  add_common(ablation);

  CLI::App* sweep = app.add_subcommand("sweep", "run fl/fd/hfl at each SNR");
  add_common(sweep);
  std::vector<double> snr_list;
  sweep->add_option("--snr-db", snr_list, "SNR points in dB")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const hfl::ExperimentConfig cfg = make_config(config_path, seed);
      std::cout << hfl::config_echo(cfg);
      write_run(cfg, hfl::run_experiment(cfg), out_path);
    } else if (ablation->parsed()) {
      hfl::ExperimentConfig cfg = make_config(config_path, seed);
      cfg.scheme = hfl::Scheme::HFL;
      std::cout << hfl::config_echo(cfg);
      for (const hfl::AblationArm& arm : hfl::run_ablation(cfg)) {
        hfl::ExperimentConfig echo_cfg = cfg;
        echo_cfg.clus_mode = arm.clus_mode;
        echo_cfg.fusion.weight_mode = arm.weight_mode;
        write_run(echo_cfg, arm.metrics, with_suffix(out_path, arm.name));
      }
    } else if (sweep->parsed()) {
      const hfl::ExperimentConfig base = make_config(config_path, seed);
      for (const double snr_db : snr_list) {
        for (const hfl::Scheme scheme :
             {hfl::Scheme::FL, hfl::Scheme::FD, hfl::Scheme::HFL}) {
          hfl::ExperimentConfig cfg = base;
          cfg.snr_db = snr_db;
          cfg.scheme = scheme;
          cfg = cfg.normalized();
          const char* name = scheme == hfl::Scheme::FL   ? "fl"
                             : scheme == hfl::Scheme::FD ? "fd"
                                                         : "hfl";
          write_run(cfg, hfl::run_experiment(cfg),
                    with_suffix(out_path, snr_tag(snr_db) + "_" + name));
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

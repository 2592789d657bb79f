#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mwucb/experiment.hpp"
#include "mwucb/selftest.hpp"

namespace fs = std::filesystem;
using namespace mwucb;

int main(int argc, char** argv) {
  CLI::App app{"Max-Weight scheduling with sliding-window UCB: simulator and experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* run_cmd = app.add_subcommand("run", "Run experiment presets");
  std::vector<std::string> presets;
  std::optional<std::size_t> horizon, seeds;
  std::optional<std::uint64_t> base_seed;
  std::size_t parallel = 1;
  std::string out_dir, config_file;
  bool regret = false;
  run_cmd->add_option("presets", presets, "Presets: fig4a fig4b fig5a fig5b sweep_logqt "
                                          "adaptive_uniform adaptive_varying custom");
  run_cmd->add_option("--horizon", horizon, "Override the horizon T")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seeds", seeds, "Replicates per policy and arrival rate")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", base_seed, "Base seed for derived cell seeds");
  run_cmd->add_option("--parallel", parallel, "Cells run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_dir, std::string("Output directory (default $") + kOutDirEnv +
                                            " or ./runs)");
  run_cmd->add_flag("--regret", regret, "Record per-frame regret and variation");
  run_cmd->add_option("--config", config_file, "TOML config for the custom preset");

  auto* sum_cmd = app.add_subcommand("summarize", "Aggregate a finished run");
  std::string manifest_path;
  sum_cmd->add_option("manifest", manifest_path, "manifest.json of a run")->required();

  auto* self_cmd = app.add_subcommand("selftest", "Run the property checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      Overrides o;
      o.horizon = horizon;
      o.seeds = seeds;
      o.base_seed = base_seed;
      o.regret = regret;
      std::optional<SimConfig> custom;
      if (!config_file.empty()) custom = load_config(config_file);
      std::vector<Cell> cells;
      for (const auto& p : presets) {
        auto more = expand_preset(p, o, custom);
        cells.insert(cells.end(), more.begin(), more.end());
      }
      if (out_dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        out_dir = env && *env ? env : "runs";
      }
      const auto manifest = run_experiment(cells, parallel, out_dir);
      for (const auto& c : manifest.cells) {
        if (c.ok)
          std::cout << c.id << ": Q_T = " << format_number(c.q_T) << " (" << c.seconds << " s)\n";
        else
          std::cerr << c.id << ": FAILED: " << c.error << '\n';
      }
      std::cout << "manifest: " << (fs::path(out_dir) / "manifest.json").string() << '\n';
      return manifest.failures() == 0 ? 0 : 1;
    }
    if (*sum_cmd) {
      const auto manifest = load_manifest(manifest_path);
      write_summary_table(std::cout, summarize(manifest));
      return 0;
    }
    if (*self_cmd) return run_selftest(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

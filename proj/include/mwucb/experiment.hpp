#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mwucb/engine.hpp"

namespace mwucb {

inline constexpr const char* kToolVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "MWUCB_OUT_DIR";

/// Parses a run configuration (TOML). Throws std::invalid_argument with the
/// offending key on malformed input.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> seeds;  // replicates per (policy, lambda); default 1
  std::optional<std::uint64_t> base_seed;
  bool regret = false;
};

/// One simulation of an experiment.
struct Cell {
  std::string id;
  std::string preset;
  std::size_t replicate = 0;
  SimConfig config;

  std::string lambda_label() const;
};

const std::vector<std::string>& preset_names();

/// Derived seed of replicate r of a preset at a given arrival label. The
/// policy is deliberately not part of the key: every policy of a preset sees
/// the same environment.
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& preset,
                        const std::string& lambda_label, std::size_t replicate);

/// Expands a preset into its cells, in a fixed order. `custom` requires a
/// config. Throws std::invalid_argument on unknown names or bad overrides.
std::vector<Cell> expand_preset(const std::string& name, const Overrides& overrides,
                                const std::optional<SimConfig>& custom = std::nullopt);

struct CellResult {
  std::string id;
  std::string preset;
  std::string policy;
  std::string lambda;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::string config_hash;
  std::string csv;  // relative to the output directory
  bool ok = false;
  std::string error;
  double q_T = 0.0;
  double seconds = 0.0;
};

struct RunManifest {
  std::filesystem::path out_dir;
  std::string summary = "summary.csv";
  std::string tool_version = kToolVersion;
  double wall_clock_seconds = 0.0;
  std::vector<CellResult> cells;

  std::size_t failures() const;
};

/// Runs every cell on up to `parallelism` threads, writes one CSV per cell,
/// summary.csv and manifest.json into out_dir, and returns the manifest.
RunManifest run_experiment(const std::vector<Cell>& cells, std::size_t parallelism,
                           const std::filesystem::path& out_dir);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

/// Q_T and T of one per-cell CSV, read back from its final row.
struct CsvTotals {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  double q_T = 0.0;
};
CsvTotals read_csv_totals(const std::filesystem::path& path);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};
Stat mean_std(const std::vector<double>& values);

struct SummaryRow {
  std::string preset;
  std::string policy;
  std::string lambda;
  std::size_t seeds = 0;
  std::size_t horizon = 0;
  Stat q_T;
  Stat q_T_over_T;
  /// log of the mean Q_T / T; -inf when it is zero.
  double log_mean_q_T_over_T = 0.0;
  /// Per-seed log(Q_T / T) statistics; -inf if any seed has Q_T = 0.
  Stat log_q_T_over_T;
};

/// Aggregates per (preset, policy, lambda), recomputed from the raw CSVs.
std::vector<SummaryRow> summarize(const RunManifest& manifest);
void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Formats a double for CSV output; infinities print as "inf" / "-inf".
std::string format_number(double v);

}  // namespace mwucb

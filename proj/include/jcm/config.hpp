#pragma once

#include <chrono>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jcm/classical.hpp"
#include "jcm/experiment.hpp"

namespace jcm {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

/// Flat `key = value` configuration. Times carry their unit in the key name
/// (`_inv_g` means units of 1/g); `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

/// Reads key-value lines. Bracketed section headers are allowed; only keys
/// outside any section or inside `[config]` are returned, so a run manifest
/// can be fed back in as a config file.
KeyValues read_key_values(std::istream& in);
KeyValues read_config_file(const std::filesystem::path& path);
std::string to_text(const KeyValues& values);

/// Later entries win.
KeyValues merge(const KeyValues& base, const KeyValues& overrides);

/// A real number or `sqrtX` (e.g. `sqrt21`).
double parse_real(std::string_view key, std::string_view text);

struct ClassicalConfig {
  double epsilon0 = 1.0;
  int n_steps = 0;
  TimingModel timing;
  CouplingParams coupling;
  SeedSpec seed;

  bool operator==(const ClassicalConfig&) const = default;
};

struct SweepConfig {
  RunConfig base;
  std::vector<double> multipliers;
  int ensemble = 1;

  bool operator==(const SweepConfig&) const = default;
};

/// Validated configs with defaults applied: tau_bar from the trapping time,
/// spread from `spread_inv_g`, `spread_frac` (of tau_bar) or `spread_mult`
/// (of the critical spread), nmax from the truncation policy.
RunConfig parse_run_config(const KeyValues& values);
ClassicalConfig parse_classical_config(const KeyValues& values);
SweepConfig parse_sweep_config(const KeyValues& values);

/// Fully resolved key-values; parsing them reproduces the config exactly.
KeyValues echo(const RunConfig& config);
KeyValues echo(const ClassicalConfig& config);
KeyValues echo(const SweepConfig& config);

struct Preset {
  std::string name;
  std::string description;
  KeyValues values;
};

const std::vector<Preset>& presets();
/// Throws ConfigError listing the valid names.
const Preset& preset(std::string_view name);

struct OutputFile {
  std::string name;
  std::string sha256;
};

struct Manifest {
  KeyValues config;
  std::uint64_t master_seed = 0;
  std::string version{kArtifactVersion};
  double wall_clock_seconds = 0.0;
  std::vector<OutputFile> outputs;
  bool terminated_early = false;
  std::string termination_reason;

  int exit_code() const { return terminated_early ? 2 : 0; }
};

std::string sha256_hex(const std::filesystem::path& file);

/// trajectory.csv, distribution.csv, manifest.txt
Manifest write_outputs(const RunConfig& config, const RunResult& result,
                       const std::filesystem::path& out_dir, double wall_clock_seconds = 0.0);
/// classical.csv, manifest.txt
Manifest write_outputs(const ClassicalConfig& config, std::span<const ClassicalStep> steps,
                       const std::filesystem::path& out_dir, double wall_clock_seconds = 0.0);
/// sweep.csv, sweep_summary.csv, manifest.txt
Manifest write_outputs(const SweepConfig& config, const SweepTable& table,
                       const std::filesystem::path& out_dir, double wall_clock_seconds = 0.0);

void write_manifest(std::ostream& out, const Manifest& manifest);

}  // namespace jcm

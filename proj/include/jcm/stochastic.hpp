#pragma once

#include <cstdint>
#include <random>

namespace jcm {

enum class TimingLaw { Uniform, Gaussian };

/// Law of the fluctuating interaction times tau_k and the Ramsey times T_k = r tau_k.
struct TimingModel {
  double tau_bar = 1.0;
  /// Full width of the uniform law; the Gaussian uses the same rms, spread / sqrt(12).
  double spread = 0.0;
  TimingLaw law = TimingLaw::Uniform;
  /// r >= 0; zero means no Ramsey zone.
  double ramsey_ratio = 0.0;
  /// Fraction d of T_k driven by an independent draw. 0 keeps T_k / tau_k = r exactly.
  double decorrelation = 0.0;

  double rms() const;
  void validate() const;
  bool operator==(const TimingModel&) const = default;
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const SeedSpec&) const = default;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic variate source. mt19937_64 is fully specified by the standard;
/// the variates below are produced here so that sequences match across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by Box-Muller (cached pair).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Engine seed = mix64(master_seed ^ mix64(stream_id + 0x9e3779b97f4a7c15)).
RandomStream derive_stream(const SeedSpec& seed);

struct TimingSample {
  double tau;
  double ramsey_time;
};

TimingSample sample_timing(const TimingModel& model, RandomStream& rng);

}  // namespace jcm

#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jcm/dynamics.hpp"
#include "jcm/fock.hpp"
#include "jcm/stochastic.hpp"

namespace jcm {

enum class RunMode {
  /// Apply the desired projection every step and book-keep its probability.
  PostSelected,
  /// Draw each atomic outcome; failures apply the orthogonal projection.
  Sampled,
};

enum class Outcome { PostSelected, SampledSuccess, SampledFailure, NonSelective };

struct InitialField {
  enum class Kind { Coherent, Fock };
  Kind kind = Kind::Coherent;
  Complex alpha{0.0, 0.0};
  int fock_n = 0;

  static InitialField coherent(Complex alpha) { return {Kind::Coherent, alpha, 0}; }
  static InitialField fock(int n) { return {Kind::Fock, {0.0, 0.0}, n}; }

  bool operator==(const InitialField&) const = default;
};

struct RunConfig {
  MeasurementScheme scheme;
  int n_atoms = 0;
  int trap_target = 0;
  int q = 1;
  InitialField initial;
  TimingModel timing;
  CouplingParams coupling;
  int n_max = 20;
  RunMode mode = RunMode::PostSelected;
  SeedSpec seed;
  /// Ramsey-zone Rabi frequency (superposition scheme only).
  double omega = 1.0;
  /// Sampled mode: stop at the first orthogonal outcome.
  bool halt_on_failure = true;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Fills tau_bar = trapping_time(n_t, q), spread = spread_mult * critical_spread(n_t),
/// and for the superposition scheme the stationary-phase T/tau ratio.
void apply_trap_defaults(RunConfig& config, double spread_mult);

struct StepRecord {
  int k = 0;
  double tau = 0.0;
  double ramsey_time = 0.0;
  /// Probability of the desired outcome at this step (1 for NSM).
  double success_prob = 1.0;
  /// Product of the probabilities of the outcomes realized so far.
  double cum_prob = 1.0;
  double mean_n = 0.0;
  double delta_n = 0.0;
  Outcome outcome = Outcome::PostSelected;
  /// |sum P(n) - 1| after the step.
  double norm_error = 0.0;
};

struct RunResult {
  std::vector<StepRecord> steps;
  std::vector<double> initial_distribution;
  std::vector<double> final_distribution;
  /// Absent for NSM, which evolves populations only.
  std::optional<FieldState> final_state;
  bool terminated_early = false;
  std::string termination_reason;
  /// Step of the first sampled orthogonal outcome.
  std::optional<int> failed_at;

  double cum_prob() const { return steps.empty() ? 1.0 : steps.back().cum_prob; }
};

/// Called after every step with the updated photon-number distribution.
using StepObserver = std::function<void(const StepRecord&, std::span<const double>)>;

/// Guard on the population of the top three Fock levels.
inline constexpr double kTruncationGuard = 1e-8;

RunResult run_sequence(const RunConfig& config, const StepObserver& observer = {});

std::pair<RunResult, RunResult> run_nsm_fixed_vs_fluctuating(const RunConfig& fixed,
                                                             const RunConfig& fluctuating,
                                                             const StepObserver& fixed_observer = {},
                                                             const StepObserver& fluct_observer = {});

struct SweepCell {
  double multiplier = 0.0;
  int cell = 0;
  double final_p_trap = 0.0;
  double cum_prob = 0.0;
  bool converged = false;
  /// Empty unless the run failed or terminated early.
  std::string error;
};

struct SweepSummary {
  double multiplier = 0.0;
  double median_final_p_trap = 0.0;
  double median_cum_prob = 0.0;
  double convergence_fraction = 0.0;
  int failed_cells = 0;
};

struct SweepTable {
  std::vector<SweepCell> cells;
  std::vector<SweepSummary> summary;
};

/// Final P(n_t) above this counts as converged.
inline constexpr double kConvergedPopulation = 0.9;

/// Runs `ensemble` members per spread multiplier (spread = m * critical_spread).
/// Cell c uses SeedSpec{base.seed.master_seed, c}; `threads` = 0 picks the hardware count.
SweepTable sweep(const RunConfig& base, std::span<const double> spread_multipliers, int ensemble,
                 unsigned threads = 0);

/// Fraction of sampled trajectories in which every outcome succeeded.
double sampled_success_estimate(const RunConfig& config, int trajectories);

const char* outcome_name(Outcome outcome);

/// CSV `k,tau_k,T_k,P_k,cum_P,mean_n,delta_n,outcome`.
void write_trajectory_csv(std::ostream& out, std::span<const StepRecord> steps);

/// CSV `multiplier,cell,final_P_nt,cum_P,converged`.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace jcm

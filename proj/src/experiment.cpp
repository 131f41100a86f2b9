#include "jcm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "jcm/error.hpp"

namespace jcm {

void RunConfig::validate() const {
  scheme.validate();
  coupling.validate();
  timing.validate();
  if (n_atoms < 0) throw ConfigError("atoms: must be >= 0");
  if (trap_target < 0) throw ConfigError("trap: must be >= 0");
  if (q < 1) throw ConfigError("q: must be >= 1 (q = 0 gives identity dynamics)");
  if (n_max < 1) throw ConfigError("nmax: must be >= 1");
  if (trap_target >= n_max - 20) {
    throw ConfigError("nmax: must exceed trap + 20 (trap = " + std::to_string(trap_target) +
                      ", nmax = " + std::to_string(n_max) + ")");
  }
  if (initial.kind == InitialField::Kind::Fock &&
      (initial.fock_n < 0 || initial.fock_n > n_max)) {
    throw ConfigError("fock: level outside [0, nmax]");
  }
  if (scheme.kind == SchemeKind::Superposition && !(omega > 0.0)) {
    throw ConfigError("omega_g: Rabi frequency must be > 0");
  }
}

void apply_trap_defaults(RunConfig& config, double spread_mult) {
  if (!(spread_mult >= 0.0)) throw ConfigError("spread_mult: must be >= 0");
  config.timing.tau_bar = trapping_time(config.trap_target, config.q, config.coupling);
  config.timing.spread = spread_mult * critical_spread(config.trap_target, config.coupling);
  if (config.scheme.kind == SchemeKind::Superposition) {
    const double r = stationary_phase_ratio(config.trap_target, config.omega, config.coupling);
    config.scheme.ramsey_ratio = r;
    config.timing.ramsey_ratio = r;
  }
}

namespace {

FieldState initial_state(const RunConfig& config) {
  if (config.initial.kind == InitialField::Kind::Fock) {
    return fock_basis_state(config.initial.fock_n, config.n_max);
  }
  return coherent_state(config.initial.alpha, config.n_max).state;
}

AtomRotation fixed_rotation(SchemeKind kind) {
  return kind == SchemeKind::Inelastic ? AtomRotation::ground() : AtomRotation::excited();
}

/// Projection for the desired (or, with `orthogonal`, the complementary) outcome.
Projection project(const FieldState& field, const RunConfig& config, const TimingSample& t,
                   bool orthogonal) {
  const auto& scheme = config.scheme;
  if (scheme.kind == SchemeKind::Superposition &&
      scheme.update == SuperpositionUpdate::LargeN) {
    return large_n_project(field, config.omega, t.ramsey_time, config.coupling, t.tau, orthogonal);
  }
  AtomRotation rot = scheme.kind == SchemeKind::Superposition
                         ? ramsey_coeffs(config.omega, t.ramsey_time, scheme.phi_f)
                         : fixed_rotation(scheme.kind);
  if (orthogonal) rot = rot.orthogonal();
  return cm_project(jcm_entangle(field, config.coupling, t.tau), rot);
}

double norm_error(std::span<const double> p) {
  return std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
}

void check_truncation(std::span<const double> p, int k) {
  const double top = top_population(p);
  if (top > kTruncationGuard) {
    throw LeakageError("truncation guard: population " + format_real(top) +
                       " in the top three Fock levels at step " + std::to_string(k) +
                       "; increase nmax");
  }
}

}  // namespace

RunResult run_sequence(const RunConfig& config, const StepObserver& observer) {
  config.validate();
  auto rng = derive_stream(config.seed);

  RunResult result;
  const bool nsm = config.scheme.kind == SchemeKind::Nsm;
  FieldState field = initial_state(config);
  std::vector<double> probs = field.probabilities();
  result.initial_distribution = probs;
  check_truncation(probs, 0);

  long double log_cum = 0.0L;
  result.steps.reserve(static_cast<std::size_t>(config.n_atoms));
  for (int k = 1; k <= config.n_atoms; ++k) {
    const TimingSample t = sample_timing(config.timing, rng);
    StepRecord rec;
    rec.k = k;
    rec.tau = t.tau;
    rec.ramsey_time = t.ramsey_time;

    if (nsm) {
      probs = nsm_step(probs, config.coupling, t.tau);
      rec.outcome = Outcome::NonSelective;
    } else if (config.mode == RunMode::PostSelected) {
      try {
        auto proj = project(field, config, t, false);
        field = std::move(proj.state);
        rec.success_prob = std::min(1.0, proj.success_prob);
      } catch (const OrthogonalOutcomeError& e) {
        result.terminated_early = true;
        result.termination_reason =
            "impossible post-selection at step " + std::to_string(k) + ": " + e.what();
        break;
      }
      log_cum += std::log(static_cast<long double>(rec.success_prob));
      probs = field.probabilities();
      rec.outcome = Outcome::PostSelected;
    } else {
      std::optional<Projection> success;
      try {
        success = project(field, config, t, false);
      } catch (const OrthogonalOutcomeError&) {
      }
      rec.success_prob = success ? std::min(1.0, success->success_prob) : 0.0;
      if (rng.uniform() < rec.success_prob) {
        field = std::move(success->state);
        log_cum += std::log(static_cast<long double>(rec.success_prob));
        rec.outcome = Outcome::SampledSuccess;
      } else {
        auto failure = project(field, config, t, true);
        field = std::move(failure.state);
        log_cum += std::log(static_cast<long double>(std::min(1.0, failure.success_prob)));
        rec.outcome = Outcome::SampledFailure;
        if (!result.failed_at) result.failed_at = k;
      }
      probs = field.probabilities();
    }

    rec.cum_prob = static_cast<double>(std::exp(log_cum));
    const auto s = stats(std::span<const double>(probs));
    rec.mean_n = s.mean_n;
    rec.delta_n = s.delta_n;
    rec.norm_error = norm_error(probs);
    check_truncation(probs, k);
    result.steps.push_back(rec);
    if (observer) observer(rec, probs);

    if (rec.outcome == Outcome::SampledFailure && config.halt_on_failure) {
      result.terminated_early = true;
      result.termination_reason = "sampled orthogonal outcome at step " + std::to_string(k);
      break;
    }
  }

  result.final_distribution = std::move(probs);
  if (!nsm) result.final_state = std::move(field);
  return result;
}

std::pair<RunResult, RunResult> run_nsm_fixed_vs_fluctuating(const RunConfig& fixed,
                                                             const RunConfig& fluctuating,
                                                             const StepObserver& fixed_observer,
                                                             const StepObserver& fluct_observer) {
  if (fixed.scheme.kind != SchemeKind::Nsm || fluctuating.scheme.kind != SchemeKind::Nsm) {
    throw ConfigError("scheme: fixed-vs-fluctuating comparison requires the nsm scheme");
  }
  return {run_sequence(fixed, fixed_observer), run_sequence(fluctuating, fluct_observer)};
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SweepCell run_cell(const RunConfig& base, double multiplier, int cell) {
  SweepCell out;
  out.multiplier = multiplier;
  out.cell = cell;
  try {
    RunConfig config = base;
    config.seed = {base.seed.master_seed, static_cast<std::uint64_t>(cell)};
    config.timing.spread = multiplier * critical_spread(config.trap_target, config.coupling);
    const auto result = run_sequence(config);
    out.cum_prob = result.cum_prob();
    if (result.terminated_early) {
      out.error = result.termination_reason;
      out.final_p_trap = std::numeric_limits<double>::quiet_NaN();
    } else {
      out.final_p_trap = result.final_distribution[config.trap_target];
      out.converged = out.final_p_trap > kConvergedPopulation;
    }
  } catch (const std::exception& e) {
    out.error = e.what();
    out.final_p_trap = std::numeric_limits<double>::quiet_NaN();
    out.cum_prob = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace

SweepTable sweep(const RunConfig& base, std::span<const double> spread_multipliers, int ensemble,
                 unsigned threads) {
  if (ensemble < 1) throw ConfigError("ensemble: must be >= 1");
  base.validate();
  const int total = static_cast<int>(spread_multipliers.size()) * ensemble;
  SweepTable table;
  table.cells.resize(static_cast<std::size_t>(total));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(total, 1)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < total; c = next++) {
      table.cells[c] = run_cell(base, spread_multipliers[c / ensemble], c);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t m = 0; m < spread_multipliers.size(); ++m) {
    SweepSummary s;
    s.multiplier = spread_multipliers[m];
    std::vector<double> finals;
    std::vector<double> cums;
    int converged = 0;
    for (int e = 0; e < ensemble; ++e) {
      const auto& cell = table.cells[m * ensemble + e];
      if (!cell.error.empty()) {
        ++s.failed_cells;
        continue;
      }
      finals.push_back(cell.final_p_trap);
      cums.push_back(cell.cum_prob);
      converged += cell.converged ? 1 : 0;
    }
    s.median_final_p_trap = median(finals);
    s.median_cum_prob = median(cums);
    s.convergence_fraction = static_cast<double>(converged) / ensemble;
    table.summary.push_back(s);
  }
  return table;
}

double sampled_success_estimate(const RunConfig& config, int trajectories) {
  if (config.mode != RunMode::Sampled) throw ConfigError("mode: estimator requires sample mode");
  if (trajectories < 1) throw ConfigError("trajectories: must be >= 1");
  if (config.n_atoms == 0) return 1.0;
  RunConfig traj = config;
  traj.halt_on_failure = true;
  const std::uint64_t base = mix64(config.seed.master_seed ^ mix64(config.seed.stream_id));
  int successes = 0;
  for (int i = 0; i < trajectories; ++i) {
    traj.seed = {base, static_cast<std::uint64_t>(i)};
    const auto result = run_sequence(traj);
    if (!result.failed_at && !result.terminated_early) ++successes;
  }
  return static_cast<double>(successes) / trajectories;
}

const char* outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::PostSelected: return "postselected";
    case Outcome::SampledSuccess: return "success";
    case Outcome::SampledFailure: return "failure";
    case Outcome::NonSelective: return "nonselective";
  }
  return "unknown";
}

void write_trajectory_csv(std::ostream& out, std::span<const StepRecord> steps) {
  out << "k,tau_k,T_k,P_k,cum_P,mean_n,delta_n,outcome\n";
  for (const auto& s : steps) {
    out << s.k << ',' << format_real(s.tau) << ',' << format_real(s.ramsey_time) << ','
        << format_real(s.success_prob) << ',' << format_real(s.cum_prob) << ','
        << format_real(s.mean_n) << ',' << format_real(s.delta_n) << ','
        << outcome_name(s.outcome) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "multiplier,cell,final_P_nt,cum_P,converged\n";
  for (const auto& c : table.cells) {
    out << format_real(c.multiplier) << ',' << c.cell << ',' << format_real(c.final_p_trap) << ','
        << format_real(c.cum_prob) << ',' << (c.converged ? 1 : 0) << '\n';
  }
}

}  // namespace jcm

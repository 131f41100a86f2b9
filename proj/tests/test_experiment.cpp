#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "jcm/error.hpp"
#include "jcm/experiment.hpp"

using namespace jcm;
using std::numbers::pi;

namespace {

RunConfig base_config(SchemeKind kind, int trap, InitialField init, int atoms, double spread_mult) {
  RunConfig c;
  c.scheme.kind = kind;
  c.trap_target = trap;
  c.initial = init;
  c.n_atoms = atoms;
  c.n_max = init.kind == InitialField::Kind::Coherent ? default_n_max(trap, init.alpha) : default_n_max(trap);
  apply_trap_defaults(c, spread_mult);
  return c;
}

}  // namespace

TEST_CASE("run_sequence: N = 0 returns the initial distribution") {
  const auto c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), 0, 0.1);
  const auto r = run_sequence(c);
  CHECK(r.steps.empty());
  CHECK(r.final_distribution == r.initial_distribution);
  CHECK(r.cum_prob() == 1.0);
}

TEST_CASE("run_sequence: elastic trapping from |20> is stationary") {
  const auto c = base_config(SchemeKind::Elastic, 20, InitialField::fock(20), 50, 0.0);
  const auto r = run_sequence(c);
  REQUIRE(r.steps.size() == 50);
  for (const auto& s : r.steps) {
    CHECK(s.success_prob == 1.0);
    CHECK(s.outcome == Outcome::PostSelected);
  }
  CHECK(r.final_distribution[20] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.cum_prob() == 1.0);
}

TEST_CASE("run_sequence: elastic trapping narrows the distribution") {
  const auto c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), 400, 0.0);
  const auto r = run_sequence(c);
  const auto initial = stats(std::span<const double>(r.initial_distribution));
  CHECK(r.steps.back().delta_n < initial.delta_n);
  for (std::size_t i = r.steps.size() / 2 + 1; i < r.steps.size(); ++i) {
    CHECK(r.steps[i].delta_n <= r.steps[i - 1].delta_n + 1e-12);
  }
}

TEST_CASE("run_sequence: elastic trapping from a state below n_t never populates n > n_t") {
  const auto c = base_config(SchemeKind::Elastic, 20, InitialField::fock(12), 200, 0.0);
  run_sequence(c, [](const StepRecord&, std::span<const double> p) {
    for (std::size_t n = 21; n < p.size(); ++n) CHECK(p[n] == 0.0);
  });
}

TEST_CASE("run_sequence: cum_P is the running product of P_k") {
  const auto c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), 300, 0.5);
  const auto r = run_sequence(c);
  long double product = 1.0L;
  double previous = 1.0;
  for (const auto& s : r.steps) {
    product *= s.success_prob;
    CHECK(s.cum_prob <= previous);
    CHECK(s.success_prob >= 0.0);
    CHECK(s.success_prob <= 1.0);
    CHECK(std::abs(s.cum_prob - static_cast<double>(product)) <= 1e-12 * static_cast<double>(product) + 1e-300);
    CHECK(s.norm_error < 1e-10);
    previous = s.cum_prob;
  }
}

TEST_CASE("run_sequence: post-selected runs are deterministic given the seed") {
  auto c = base_config(SchemeKind::Superposition, 21, InitialField::coherent({std::sqrt(21.0), 0.0}), 200, 2.0);
  c.seed = {99, 4};
  const auto a = run_sequence(c);
  const auto b = run_sequence(c);
  std::ostringstream sa, sb;
  write_trajectory_csv(sa, a.steps);
  write_trajectory_csv(sb, b.steps);
  CHECK(sa.str() == sb.str());
  CHECK(a.final_distribution == b.final_distribution);
  c.seed = {99, 5};
  std::ostringstream sc;
  write_trajectory_csv(sc, run_sequence(c).steps);
  CHECK(sc.str() != sa.str());
}

TEST_CASE("run_sequence: superposition closure never lowers P(n_t) at fixed times") {
  const auto c = base_config(SchemeKind::Superposition, 21, InitialField::coherent({std::sqrt(21.0), 0.0}), 2000, 0.0);
  double previous = 0.0;
  run_sequence(c, [&](const StepRecord&, std::span<const double> p) {
    CHECK(p[21] >= previous - 1e-15);
    previous = p[21];
  });
  CHECK(previous > 0.99);
}

TEST_CASE("run_sequence: superposition with the exact update") {
  auto c = base_config(SchemeKind::Superposition, 21, InitialField::coherent({std::sqrt(21.0), 0.0}), 40, 0.0);
  c.scheme.update = SuperpositionUpdate::Exact;
  // At the trapping time the Ramsey angle is pi, which reduces to the elastic scheme.
  auto e = c;
  e.scheme = MeasurementScheme::elastic();
  e.timing.ramsey_ratio = 0.0;
  const auto a = run_sequence(c);
  const auto b = run_sequence(e);
  for (std::size_t n = 0; n < a.final_distribution.size(); ++n) {
    CHECK(a.final_distribution[n] == doctest::Approx(b.final_distribution[n]).epsilon(1e-9));
  }
}

TEST_CASE("run_sequence: impossible post-selection terminates early") {
  auto c = base_config(SchemeKind::Inelastic, 20, InitialField::fock(20), 5, 0.0);
  const auto r = run_sequence(c);
  CHECK(r.terminated_early);
  CHECK(r.termination_reason.find("impossible post-selection") != std::string::npos);
  CHECK(r.steps.empty());
}

TEST_CASE("run_sequence: truncation guard raises LeakageError") {
  // NSM far from any trapping condition pumps population up to n_max.
  auto c = base_config(SchemeKind::Nsm, 4, InitialField::coherent({1.0, 0.0}), 400, 0.0);
  c.timing.tau_bar = 0.37;
  CHECK_THROWS_AS(run_sequence(c), LeakageError);
}

TEST_CASE("run_sequence: NSM at fixed trapping times") {
  const auto c = base_config(SchemeKind::Nsm, 40, InitialField::fock(3), 600, 0.0);
  double previous_mean = 0.0;
  run_sequence(c, [&](const StepRecord& s, std::span<const double> p) {
    for (std::size_t n = 41; n < p.size(); ++n) CHECK(p[n] == 0.0);
    CHECK(s.mean_n >= previous_mean);
    CHECK(s.outcome == Outcome::NonSelective);
    CHECK(s.success_prob == 1.0);
    previous_mean = s.mean_n;
  });
}

TEST_CASE("run_nsm_fixed_vs_fluctuating") {
  auto fixed = base_config(SchemeKind::Nsm, 20, InitialField::coherent({3.0, 0.0}), 100, 0.0);
  fixed.n_max = 150;  // fluctuating NSM climbs well past n_t
  auto fluct = fixed;
  fluct.timing.spread = 0.01 * fluct.timing.tau_bar;
  const auto [a, b] = run_nsm_fixed_vs_fluctuating(fixed, fluct);
  CHECK(a.steps.size() == 100);
  CHECK(b.steps.size() == 100);
  CHECK(a.final_distribution != b.final_distribution);
  auto bad = fixed;
  bad.scheme = MeasurementScheme::elastic();
  CHECK_THROWS_AS(run_nsm_fixed_vs_fluctuating(bad, fluct), ConfigError);
}

TEST_CASE("sampled mode: single-step binomial oracle") {
  auto c = base_config(SchemeKind::Elastic, 20, InitialField::fock(0), 1, 0.0);
  c.timing.tau_bar = pi / 3;  // theta_0 = pi/3, success probability 1/4
  c.mode = RunMode::Sampled;
  c.seed = {12345, 0};
  const int trials = 100000;
  const double f = sampled_success_estimate(c, trials);
  const double sigma = std::sqrt(0.25 * 0.75 / trials);
  CHECK(std::abs(f - 0.25) < 4.0 * sigma);
}

TEST_CASE("sampled mode: N = 0 always succeeds") {
  auto c = base_config(SchemeKind::Elastic, 20, InitialField::fock(0), 0, 0.0);
  c.mode = RunMode::Sampled;
  CHECK(sampled_success_estimate(c, 10) == 1.0);
  c.mode = RunMode::PostSelected;
  CHECK_THROWS_AS(sampled_success_estimate(c, 10), ConfigError);
}

TEST_CASE("sampled mode matches the post-selected product from a coherent state") {
  auto c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({1.0, 0.0}), 5, 0.0);
  const double cum = run_sequence(c).cum_prob();
  c.mode = RunMode::Sampled;
  c.seed = {777, 0};
  const int trials = 20000;
  const double f = sampled_success_estimate(c, trials);
  CHECK(std::abs(f - cum) < 4.0 * std::sqrt(cum * (1 - cum) / trials));
}

TEST_CASE("sampled mode: failures are recorded; continuing keeps going") {
  auto c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({2.0, 0.0}), 60, 0.5);
  c.mode = RunMode::Sampled;
  c.halt_on_failure = false;
  int failures = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    c.seed = {s, 0};
    const auto r = run_sequence(c);
    CHECK(r.steps.size() == 60);
    for (const auto& st : r.steps) {
      failures += st.outcome == Outcome::SampledFailure;
      CHECK(st.norm_error < 1e-10);
    }
    if (r.failed_at) CHECK(r.steps[*r.failed_at - 1].outcome == Outcome::SampledFailure);
  }
  CHECK(failures > 0);
  c.halt_on_failure = true;
  c.seed = {0, 0};
  const auto halted = run_sequence(c);
  if (halted.failed_at) {
    CHECK(halted.terminated_early);
    CHECK(halted.steps.size() == static_cast<std::size_t>(*halted.failed_at));
  }
}

TEST_CASE("sweep: ordering, determinism and fixed-time column") {
  auto base = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), 300, 0.0);
  base.seed = {5, 0};
  const std::vector<double> zero = {0.0};
  const auto fixed = sweep(base, zero, 1);
  const auto direct = run_sequence(base);
  REQUIRE(fixed.cells.size() == 1);
  CHECK(fixed.cells[0].final_p_trap == direct.final_distribution[20]);
  CHECK(fixed.cells[0].cum_prob == direct.cum_prob());

  const std::vector<double> mults = {0.1, 1.0};
  const auto a = sweep(base, mults, 4, 3);
  const auto b = sweep(base, mults, 4, 1);
  std::ostringstream sa, sb;
  write_sweep_csv(sa, a);
  write_sweep_csv(sb, b);
  CHECK(sa.str() == sb.str());
  for (int i = 0; i < 8; ++i) CHECK(a.cells[i].cell == i);
  CHECK(a.summary.size() == 2);
  CHECK(sa.str().rfind("multiplier,cell,final_P_nt,cum_P,converged\n", 0) == 0);
}

TEST_CASE("sweep: per-cell errors are recorded, not thrown") {
  auto base = base_config(SchemeKind::Inelastic, 20, InitialField::fock(20), 3, 0.0);
  const std::vector<double> mults = {0.0};
  const auto t = sweep(base, mults, 2);
  CHECK(t.summary[0].failed_cells == 2);
  CHECK_FALSE(t.cells[0].error.empty());
}

TEST_CASE("RunConfig validation") {
  auto c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), 10, 0.1);
  c.n_max = 40;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), -1, 0.1);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config(SchemeKind::Elastic, 20, InitialField::coherent({3.0, 0.0}), 1, 0.1);
  c.q = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("trajectory CSV columns") {
  const auto c = base_config(SchemeKind::Elastic, 20, InitialField::fock(20), 1, 0.0);
  std::ostringstream out;
  write_trajectory_csv(out, run_sequence(c).steps);
  const auto text = out.str();
  CHECK(text.rfind("k,tau_k,T_k,P_k,cum_P,mean_n,delta_n,outcome\n1,", 0) == 0);
  CHECK(text.find(",postselected\n") != std::string::npos);
}

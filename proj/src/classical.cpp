#include "jcm/classical.hpp"

#include <cmath>

#include "jcm/error.hpp"
#include "jcm/fock.hpp"

namespace jcm {

PendulumRate pendulum_rhs(const PendulumState& state) {
  return {state.epsilon, std::sin(state.theta)};
}

double pendulum_energy(const PendulumState& state) {
  return 0.5 * state.epsilon * state.epsilon + std::cos(state.theta);
}

namespace {

PendulumState advance(const PendulumState& s, const PendulumRate& r, double h) {
  return {s.theta + h * r.dtheta, s.epsilon + h * r.depsilon};
}

PendulumState rk4_step(const PendulumState& s, double h) {
  const auto k1 = pendulum_rhs(s);
  const auto k2 = pendulum_rhs(advance(s, k1, 0.5 * h));
  const auto k3 = pendulum_rhs(advance(s, k2, 0.5 * h));
  const auto k4 = pendulum_rhs(advance(s, k3, h));
  return {s.theta + h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta),
          s.epsilon + h / 6.0 * (k1.depsilon + 2.0 * k2.depsilon + 2.0 * k3.depsilon + k4.depsilon)};
}

}  // namespace

PendulumState integrate_pendulum(PendulumState state, double duration, double step) {
  if (!(step > 0.0)) throw ConfigError("step: must be > 0");
  if (!(duration >= 0.0)) throw ConfigError("duration: must be >= 0");
  const auto full_steps = static_cast<long long>(std::floor(duration / step));
  for (long long i = 0; i < full_steps; ++i) state = rk4_step(state, step);
  const double rest = duration - static_cast<double>(full_steps) * step;
  if (rest > 0.0) state = rk4_step(state, rest);
  return state;
}

double return_map_approx(double epsilon, double g_tau) {
  if (epsilon == 0.0) throw ConfigError("epsilon: return map is singular at epsilon = 0");
  const double s = std::sin(0.5 * epsilon * g_tau);
  return epsilon + 2.0 / epsilon * s * s;
}

std::vector<ClassicalStep> classical_run(double epsilon0, int n_steps, const TimingModel& timing,
                                         const CouplingParams& params, const SeedSpec& seed) {
  if (!(epsilon0 > 0.0)) throw ConfigError("epsilon0: must be > 0");
  if (n_steps < 0) throw ConfigError("atoms: must be >= 0");
  params.validate();
  timing.validate();
  auto rng = derive_stream(seed);
  std::vector<ClassicalStep> steps;
  steps.reserve(static_cast<std::size_t>(n_steps));
  double eps = epsilon0;
  for (int k = 1; k <= n_steps; ++k) {
    const double tau = sample_timing(timing, rng).tau;
    eps = return_map_approx(eps, params.g * tau);
    steps.push_back({k, tau, eps, 0.25 * eps * eps});
  }
  return steps;
}

void write_classical_csv(std::ostream& out, std::span<const ClassicalStep> steps) {
  out << "k,tau_k,epsilon,eps_sq_over_4\n";
  for (const auto& s : steps) {
    out << s.k << ',' << format_real(s.tau) << ',' << format_real(s.epsilon) << ','
        << format_real(s.eps_sq_over_4) << '\n';
  }
}

}  // namespace jcm

#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "jcm/dynamics.hpp"
#include "jcm/stochastic.hpp"

namespace jcm {

/// Classical pendulum counterpart: theta is the atomic polarization (tipping
/// angle, unwrapped), epsilon the dimensionless cavity field.
struct PendulumState {
  double theta = 0.0;
  double epsilon = 0.0;
};

struct PendulumRate {
  double dtheta;
  double depsilon;
};

/// d theta / d(g tau) = epsilon,  d epsilon / d(g tau) = sin theta.
PendulumRate pendulum_rhs(const PendulumState& state);

/// First integral epsilon^2 / 2 + cos theta.
double pendulum_energy(const PendulumState& state);

/// Fixed-step classical RK4 over `duration` (in units of g tau); the last step
/// is shortened to land exactly on `duration`.
PendulumState integrate_pendulum(PendulumState state, double duration, double step);

/// epsilon + (2 / epsilon) sin^2(epsilon g tau / 2).
double return_map_approx(double epsilon, double g_tau);

struct ClassicalStep {
  int k;
  double tau;
  double epsilon;
  double eps_sq_over_4;
};

/// Iterates the approximate return map with tau_k drawn from `timing`.
/// Step k = 1..n_steps records the field after the k-th atom.
std::vector<ClassicalStep> classical_run(double epsilon0, int n_steps, const TimingModel& timing,
                                         const CouplingParams& params, const SeedSpec& seed);

/// CSV `k,tau_k,epsilon,eps_sq_over_4`.
void write_classical_csv(std::ostream& out, std::span<const ClassicalStep> steps);

}  // namespace jcm

#include "jcm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jcm/error.hpp"

namespace jcm {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_time(double tau, const char* what) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw ConfigError(std::string(what) + ": time must be finite and >= 0");
  }
}

}  // namespace

void CouplingParams::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("coupling_g: must be > 0");
}

double EntangledState::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : e_branch) sum += std::norm(a);
  for (const auto& a : g_branch) sum += std::norm(a);
  return sum;
}

void MeasurementScheme::validate() const {
  if (kind != SchemeKind::Superposition) return;
  if (!(ramsey_ratio > 0.0)) throw ConfigError("ramsey_ratio: must be > 0 for superposition");
  if (update == SuperpositionUpdate::LargeN &&
      std::abs(phi_f + std::numbers::pi / 2) > 1e-12) {
    throw ConfigError("phi_f_rad: the large-n update requires phi_f = -pi/2");
  }
}

double theta(const CouplingParams& params, double tau, int n) {
  return params.g * tau * std::sqrt(static_cast<double>(n) + 1.0);
}

RabiPhase rabi_phase(const CouplingParams& params, double tau, int n) {
  const double th = theta(params, tau, n);
  const double quarter_turns = th / (0.5 * std::numbers::pi);
  const double nearest = std::nearbyint(quarter_turns);
  const double window = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, nearest);
  if (std::abs(quarter_turns - nearest) <= window) {
    switch (static_cast<long long>(std::fmod(nearest, 4.0) + 4.0) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(th), std::sin(th)};
}

EntangledState jcm_entangle(const FieldState& field, const CouplingParams& params, double tau) {
  require_time(tau, "tau");
  const int n_max = field.n_max();
  const double top_leak = std::abs(field[n_max]) * std::abs(rabi_phase(params, tau, n_max).sin);
  if (top_leak > kLeakageAmplitude) {
    throw LeakageError("jcm_entangle: amplitude " + format_real(top_leak) +
                       " would leave the Fock space above n_max = " + std::to_string(n_max));
  }
  EntangledState ent;
  ent.e_branch.resize(field.amplitudes().size());
  ent.g_branch.resize(field.amplitudes().size());
  for (int n = 0; n <= n_max; ++n) {
    const auto ph = rabi_phase(params, tau, n);
    ent.e_branch[n] = field[n] * ph.cos;
    ent.g_branch[n] = -kI * field[n] * ph.sin;
  }
  return ent;
}

std::vector<double> nsm_step(std::span<const double> probs, const CouplingParams& params,
                             double tau) {
  require_time(tau, "tau");
  if (probs.size() < 2) throw ConfigError("n_max: truncation must satisfy n_max >= 1");
  const int n_max = static_cast<int>(probs.size()) - 1;
  const double top_sin = rabi_phase(params, tau, n_max).sin;
  if (probs[n_max] * top_sin * top_sin > kLeakageAmplitude * kLeakageAmplitude) {
    throw LeakageError("nsm_step: population " + format_real(probs[n_max] * top_sin * top_sin) +
                       " would leave the Fock space above n_max = " + std::to_string(n_max));
  }
  std::vector<double> out(probs.size(), 0.0);
  for (int n = 0; n <= n_max; ++n) {
    const double s = rabi_phase(params, tau, n).sin;
    const double moved = probs[n] * s * s;
    out[n] += probs[n] - moved;
    if (n < n_max) out[n + 1] += moved;
  }
  return out;
}

AtomRotation ramsey_coeffs(double omega, double ramsey_time, double phi_f) {
  require_time(ramsey_time, "ramsey_time");
  const double half = 0.5 * omega * ramsey_time;
  return {Complex(std::cos(half), 0.0), std::sin(half) * std::polar(1.0, phi_f)};
}

Projection cm_project(const EntangledState& ent, const AtomRotation& rot) {
  const Complex a = std::conj(rot.alpha_f);
  const Complex b = std::conj(rot.beta_f);
  std::vector<Complex> d(ent.e_branch.size());
  double prob = 0.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    d[n] = a * ent.e_branch[n];
    if (n > 0) d[n] += b * ent.g_branch[n - 1];
    prob += std::norm(d[n]);
  }
  if (prob < kOrthogonalThreshold) {
    throw OrthogonalOutcomeError("cm_project: post-selection probability " + format_real(prob) +
                                     " is numerically zero",
                                 prob);
  }
  return {renormalize(FieldState(std::move(d))), prob};
}

Complex approx_cm_coefficient(Complex c_prev, double omega, double ramsey_time,
                              const CouplingParams& params, double tau, int n) {
  return std::cos(0.5 * omega * ramsey_time - theta(params, tau, n)) * c_prev;
}

Projection large_n_project(const FieldState& field, double omega, double ramsey_time,
                           const CouplingParams& params, double tau, bool orthogonal) {
  require_time(tau, "tau");
  require_time(ramsey_time, "ramsey_time");
  std::vector<Complex> d(field.amplitudes().size());
  double prob = 0.0;
  for (int n = 0; n <= field.n_max(); ++n) {
    if (orthogonal) {
      const double arg = 0.5 * omega * ramsey_time - theta(params, tau, n);
      d[n] = kI * std::sin(arg) * field[n];
    } else {
      d[n] = approx_cm_coefficient(field[n], omega, ramsey_time, params, tau, n);
    }
    prob += std::norm(d[n]);
  }
  if (prob < kOrthogonalThreshold) {
    throw OrthogonalOutcomeError("large_n_project: post-selection probability " +
                                     format_real(prob) + " is numerically zero",
                                 prob);
  }
  return {renormalize(FieldState(std::move(d))), prob};
}

double trapping_time(int trap_target, int q, const CouplingParams& params) {
  if (trap_target < 0) throw ConfigError("trap: must be >= 0");
  if (q < 0) throw ConfigError("q: must be >= 0");
  params.validate();
  return q * std::numbers::pi / (params.g * std::sqrt(trap_target + 1.0));
}

double critical_spread(int trap_target, const CouplingParams& params) {
  if (trap_target < 0) throw ConfigError("trap: must be >= 0");
  params.validate();
  return std::numbers::pi / (2.0 * params.g * std::sqrt(trap_target + 1.0));
}

double stationary_phase_ratio(int trap_target, double omega, const CouplingParams& params) {
  if (!(omega > 0.0)) throw ConfigError("omega_g: Rabi frequency must be > 0");
  params.validate();
  return 2.0 * params.g * std::sqrt(trap_target + 1.0) / omega;
}

}  // namespace jcm

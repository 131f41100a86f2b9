#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "jcm/fock.hpp"

namespace jcm {

/// Field-dipole coupling g. Times are always paired with g as the product g*tau.
struct CouplingParams {
  double g = 1.0;

  void validate() const;
  bool operator==(const CouplingParams&) const = default;
};

/// Atom-field state after one resonant interaction with an atom entering in |e>.
///   e_branch[n]: amplitude of |e>|n>
///   g_branch[n]: amplitude of |g>|n+1>
struct EntangledState {
  std::vector<Complex> e_branch;
  std::vector<Complex> g_branch;

  int n_max() const { return static_cast<int>(e_branch.size()) - 1; }
  double norm_squared() const;
};

/// Final atomic state alpha_f|e> + beta_f|g> selected by the detector.
struct AtomRotation {
  Complex alpha_f{1.0, 0.0};
  Complex beta_f{0.0, 0.0};

  /// (-beta_f*, alpha_f*), the complementary detector outcome.
  AtomRotation orthogonal() const { return {-std::conj(beta_f), std::conj(alpha_f)}; }
  double norm_squared() const { return std::norm(alpha_f) + std::norm(beta_f); }

  static AtomRotation excited() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static AtomRotation ground() { return {{0.0, 0.0}, {1.0, 0.0}}; }
};

enum class SchemeKind { Nsm, Elastic, Inelastic, Superposition };

/// How the superposition scheme updates the field amplitudes.
enum class SuperpositionUpdate {
  /// c_n -> cos(Omega T/2 - g tau sqrt(n+1)) c_n, the large-n form.
  LargeN,
  /// Full projection of the entangled state onto the Ramsey-rotated final state.
  Exact,
};

struct MeasurementScheme {
  SchemeKind kind = SchemeKind::Nsm;
  double phi_f = -std::numbers::pi / 2;
  /// T_k / tau_k. Only meaningful for Superposition.
  double ramsey_ratio = 0.0;
  SuperpositionUpdate update = SuperpositionUpdate::LargeN;

  static MeasurementScheme nsm() { return {SchemeKind::Nsm}; }
  static MeasurementScheme elastic() { return {SchemeKind::Elastic}; }
  static MeasurementScheme inelastic() { return {SchemeKind::Inelastic}; }
  static MeasurementScheme superposition(double phi_f, double ramsey_ratio,
                                         SuperpositionUpdate update = SuperpositionUpdate::LargeN) {
    return {SchemeKind::Superposition, phi_f, ramsey_ratio, update};
  }

  void validate() const;
  bool operator==(const MeasurementScheme&) const = default;
};

/// Amplitude leaving the top Fock level above which a step is rejected.
inline constexpr double kLeakageAmplitude = 1e-8;
/// Post-selection probabilities below this are treated as impossible.
inline constexpr double kOrthogonalThreshold = 1e-12;

/// g tau sqrt(n+1).
double theta(const CouplingParams& params, double tau, int n);

struct RabiPhase {
  double cos;
  double sin;
};

/// cos and sin of theta_n. A phase within 8 ulp of a multiple of pi/2 is taken
/// as exactly that multiple, so the trapping condition blocks transfer exactly.
RabiPhase rabi_phase(const CouplingParams& params, double tau, int n);

EntangledState jcm_entangle(const FieldState& field, const CouplingParams& params, double tau);

/// Outcome-averaged population map:
///   P'(n) = P(n) cos^2 theta_n + P(n-1) sin^2 theta_{n-1}
std::vector<double> nsm_step(std::span<const double> probs, const CouplingParams& params,
                             double tau);

/// alpha_f = cos(Omega T/2), beta_f = sin(Omega T/2) e^{i phi_f}.
AtomRotation ramsey_coeffs(double omega, double ramsey_time, double phi_f);

struct Projection {
  FieldState state;
  /// Norm of the projected (unnormalized) amplitudes.
  double success_prob;
};

/// d_n = alpha_f* e_branch[n] + beta_f* g_branch[n-1]; returns d / |d| and |d|^2.
Projection cm_project(const EntangledState& ent, const AtomRotation& rot);

/// cos(Omega T/2 - g tau sqrt(n+1)) * c_prev, without the 1/sqrt(P_k) factor.
Complex approx_cm_coefficient(Complex c_prev, double omega, double ramsey_time,
                              const CouplingParams& params, double tau, int n);

/// Large-n superposition update applied to every component (phi_f = -pi/2).
/// The orthogonal outcome uses i sin(Omega T/2 - theta_n) instead of the cosine.
Projection large_n_project(const FieldState& field, double omega, double ramsey_time,
                           const CouplingParams& params, double tau, bool orthogonal = false);

/// q pi / (g sqrt(n_t + 1)).
double trapping_time(int trap_target, int q, const CouplingParams& params);

/// Gap between trapping and anti-trapping times: pi / (2 g sqrt(n_t + 1)).
double critical_spread(int trap_target, const CouplingParams& params);

/// T/tau ratio r with Omega r = 2 g sqrt(n_t + 1), which zeroes the large-n
/// cosine argument at n_t for every interaction time.
double stationary_phase_ratio(int trap_target, double omega, const CouplingParams& params);

}  // namespace jcm

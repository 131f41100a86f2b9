#pragma once

#include <complex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace jcm {

using Complex = std::complex<double>;

/// Field amplitudes c_n over the truncated Fock basis n = 0..n_max.
class FieldState {
 public:
  /// Requires at least two amplitudes (n_max >= 1). No normalization is applied.
  explicit FieldState(std::vector<Complex> amplitudes);

  int n_max() const { return static_cast<int>(amplitudes_.size()) - 1; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  const Complex& operator[](int n) const { return amplitudes_[n]; }

  double norm_squared() const;
  std::vector<double> probabilities() const;

 private:
  std::vector<Complex> amplitudes_;
};

struct FieldStats {
  double mean_n = 0.0;
  double delta_n = 0.0;
  std::vector<double> distribution;
};

struct CoherentState {
  FieldState state;
  /// 1 - sum |c_n|^2 before renormalization.
  double leakage;
};

/// Maximum pre-normalization leakage accepted by coherent_state.
inline constexpr double kCoherentLeakageTolerance = 1e-6;

CoherentState coherent_state(Complex alpha, int n_max);
FieldState fock_basis_state(int n, int n_max);

FieldStats stats(const FieldState& state);
FieldStats stats(std::span<const double> distribution);

FieldState renormalize(const FieldState& state);

/// n_t + max(21, ceil(6 sqrt(n_t + 1))).
int default_n_max(int trap_target);

/// As above, raised until the coherent state |alpha> keeps at most 1e-10
/// of its population in the top three levels (below 1e-18, so jcm_entangle's
/// 1e-8 amplitude check at n_max cannot fire on the initial state).
int default_n_max(int trap_target, Complex alpha);

/// Total population in the highest `levels` Fock levels.
double top_population(std::span<const double> distribution, int levels = 3);

/// Shortest decimal form with 17 significant digits.
std::string format_real(double value);

/// Two-column CSV `n,P(n)`.
void write_distribution_csv(std::ostream& out, std::span<const double> distribution);

}  // namespace jcm

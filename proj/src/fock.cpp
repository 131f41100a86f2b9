#include "jcm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "jcm/error.hpp"

namespace jcm {

FieldState::FieldState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) {
    throw ConfigError("n_max: truncation must satisfy n_max >= 1");
  }
}

double FieldState::norm_squared() const {
  double sum = 0.0;
  for (const auto& c : amplitudes_) sum += std::norm(c);
  return sum;
}

std::vector<double> FieldState::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(),
                 [](const Complex& c) { return std::norm(c); });
  return p;
}

CoherentState coherent_state(Complex alpha, int n_max) {
  if (n_max < 1) throw ConfigError("n_max: truncation must satisfy n_max >= 1");
  std::vector<Complex> c(static_cast<std::size_t>(n_max) + 1);
  // c_{n+1} = c_n * alpha / sqrt(n+1) avoids factorials.
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < n_max; ++n) {
    c[n + 1] = c[n] * alpha / std::sqrt(static_cast<double>(n + 1));
  }
  double captured = 0.0;
  for (const auto& a : c) captured += std::norm(a);
  const double leakage = std::max(0.0, 1.0 - captured);
  if (leakage > kCoherentLeakageTolerance) {
    throw LeakageError("coherent state with |alpha|^2 = " + format_real(std::norm(alpha)) +
                       " leaks " + format_real(leakage) + " beyond n_max = " +
                       std::to_string(n_max));
  }
  return {renormalize(FieldState(std::move(c))), leakage};
}

FieldState fock_basis_state(int n, int n_max) {
  if (n_max < 1) throw ConfigError("n_max: truncation must satisfy n_max >= 1");
  if (n < 0 || n > n_max) {
    throw ConfigError("fock: level " + std::to_string(n) + " outside [0, " +
                      std::to_string(n_max) + "]");
  }
  std::vector<Complex> c(static_cast<std::size_t>(n_max) + 1);
  c[n] = 1.0;
  return FieldState(std::move(c));
}

FieldStats stats(std::span<const double> distribution) {
  FieldStats s;
  s.distribution.assign(distribution.begin(), distribution.end());
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t n = 0; n < distribution.size(); ++n) {
    const double nn = static_cast<double>(n);
    m1 += nn * distribution[n];
    m2 += nn * nn * distribution[n];
  }
  s.mean_n = m1;
  // Fock states give m2 == m1^2 exactly; clamp rounding noise elsewhere.
  s.delta_n = std::sqrt(std::max(0.0, m2 - m1 * m1));
  return s;
}

FieldStats stats(const FieldState& state) {
  const auto p = state.probabilities();
  return stats(std::span<const double>(p));
}

FieldState renormalize(const FieldState& state) {
  const double norm2 = state.norm_squared();
  if (!(norm2 > 1e-12)) {
    throw OrthogonalOutcomeError("cannot renormalize a state with norm^2 " + format_real(norm2),
                                 norm2);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  std::vector<Complex> c(state.amplitudes().begin(), state.amplitudes().end());
  for (auto& a : c) a *= scale;
  return FieldState(std::move(c));
}

int default_n_max(int trap_target) {
  const int tail = static_cast<int>(std::ceil(6.0 * std::sqrt(trap_target + 1.0)));
  return trap_target + std::max(21, tail);
}

int default_n_max(int trap_target, Complex alpha) {
  int n_max = default_n_max(trap_target);
  const double mean = std::norm(alpha);
  if (mean == 0.0) return n_max;
  // Poisson tail weights e^{-m} m^n / n!, summed over the top three levels.
  auto top3 = [mean](int top) {
    double sum = 0.0;
    for (int n = top - 2; n <= top; ++n) {
      sum += std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
    }
    return sum;
  };
  while (static_cast<double>(n_max) < mean || top3(n_max) > 1e-18) ++n_max;
  return n_max;
}

double top_population(std::span<const double> distribution, int levels) {
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(levels), distribution.size());
  double sum = 0.0;
  for (std::size_t i = distribution.size() - count; i < distribution.size(); ++i) {
    sum += distribution[i];
  }
  return sum;
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_distribution_csv(std::ostream& out, std::span<const double> distribution) {
  out << "n,P(n)\n";
  for (std::size_t n = 0; n < distribution.size(); ++n) {
    out << n << ',' << format_real(distribution[n]) << '\n';
  }
}

}  // namespace jcm

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "jcm/error.hpp"
#include "jcm/fock.hpp"
#include "oracles.hpp"

using namespace jcm;

TEST_CASE("coherent_state: vacuum for alpha = 0") {
  const auto c = coherent_state({0.0, 0.0}, 10);
  CHECK(c.state.n_max() == 10);
  CHECK(c.state[0] == Complex(1.0, 0.0));
  for (int n = 1; n <= 10; ++n) CHECK(std::abs(c.state[n]) == 0.0);
}

TEST_CASE("coherent_state: Poisson moments") {
  struct Case {
    Complex alpha;
    int n_max;
    double mean;
  };
  for (const auto& tc : {Case{{3.0, 0.0}, 60, 9.0}, Case{{std::sqrt(21.0), 0.0}, 80, 21.0},
                         Case{{1.5, -2.0}, 60, 6.25}}) {
    const auto c = coherent_state(tc.alpha, tc.n_max);
    const auto s = stats(c.state);
    CHECK(s.mean_n == doctest::Approx(tc.mean).epsilon(1e-6 / tc.mean));
    CHECK(s.delta_n == doctest::Approx(std::sqrt(tc.mean)).epsilon(1e-6));
    const auto p = c.state.probabilities();
    const auto poisson = oracle::poisson(tc.mean, tc.n_max);
    for (int n = 0; n <= tc.n_max; ++n) CHECK(p[n] == doctest::Approx(poisson[n]).epsilon(1e-9));
    CHECK(std::abs(c.state.norm_squared() - 1.0) < 1e-10);
  }
}

TEST_CASE("coherent_state: amplitude phase follows alpha^n") {
  const Complex alpha = std::polar(2.0, 0.7);
  const auto c = coherent_state(alpha, 40);
  for (int n = 1; n < 8; ++n) {
    CHECK(std::arg(c.state[n] / c.state[0]) == doctest::Approx(std::remainder(0.7 * n, 2 * std::numbers::pi)));
  }
}

TEST_CASE("coherent_state: leakage guard and monotone leakage") {
  CHECK_THROWS_AS(coherent_state({3.0, 0.0}, 10), LeakageError);
  CHECK_THROWS_AS(coherent_state({0.0, 0.0}, 0), ConfigError);
  double previous = 1.0;
  for (int n_max = 15; n_max <= 60; ++n_max) {
    // Small truncations are rejected; accepted ones must leak less as n_max grows.
    try {
      const double leak = coherent_state({3.0, 0.0}, n_max).leakage;
      CHECK(leak <= previous);
      previous = leak;
    } catch (const LeakageError&) {
      CHECK(previous == 1.0);
    }
  }
  CHECK(previous < 1e-6);
}

TEST_CASE("fock_basis_state") {
  const auto vac = fock_basis_state(0, 5);
  CHECK(vac[0] == Complex(1.0, 0.0));
  const auto s = stats(fock_basis_state(21, 40));
  CHECK(s.distribution[21] == 1.0);
  CHECK(s.mean_n == 21.0);
  CHECK(s.delta_n == 0.0);
  CHECK_THROWS_AS(fock_basis_state(41, 40), ConfigError);
  CHECK_THROWS_AS(fock_basis_state(-1, 40), ConfigError);
}

TEST_CASE("stats: Fock states have zero spread exactly") {
  for (int n = 0; n <= 200; ++n) CHECK(stats(fock_basis_state(n, 200)).delta_n == 0.0);
}

TEST_CASE("stats: two-point distribution") {
  const double h = 1.0 / std::sqrt(2.0);
  const auto s = stats(FieldState({h, 0.0, h, 0.0}));
  CHECK(s.mean_n == doctest::Approx(1.0));
  CHECK(s.delta_n == doctest::Approx(1.0));
}

TEST_CASE("renormalize") {
  const auto a = renormalize(FieldState({0.5, 0.0}));
  CHECK(a[0] == Complex(1.0, 0.0));
  const auto b = renormalize(FieldState({0.3, Complex(0.0, 0.4)}));
  CHECK(std::abs(b.norm_squared() - 1.0) < 1e-12);
  CHECK(std::arg(b[1]) == doctest::Approx(std::numbers::pi / 2));
  CHECK(std::abs(b[0]) == doctest::Approx(0.6));
  CHECK_THROWS_AS(renormalize(FieldState({0.0, 0.0, 0.0})), OrthogonalOutcomeError);
}

TEST_CASE("renormalize: property over random states") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(1e-5, 1e3);
  for (int i = 0; i < 200; ++i) {
    auto c = oracle::random_state(rng, 2 + i % 30);
    const double s = scale(rng);
    for (auto& a : c) a *= s;
    const auto r = renormalize(FieldState(c));
    CHECK(std::abs(r.norm_squared() - 1.0) < 1e-12);
    CHECK(std::abs(std::arg(r[1] / r[0]) - std::arg(c[1] / c[0])) < 1e-12);
  }
}

TEST_CASE("default_n_max policy") {
  CHECK(default_n_max(0) == 21);
  CHECK(default_n_max(20) == 20 + 28);  // ceil(6 sqrt 21) = 28
  CHECK(default_n_max(21) == 21 + 29);
  CHECK(default_n_max(138) == 138 + 71);
}

TEST_CASE("distribution CSV") {
  std::ostringstream out;
  const std::vector<double> p = {0.25, 0.75};
  write_distribution_csv(out, p);
  CHECK(out.str() == "n,P(n)\n0,0.25\n1,0.75\n");
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("FieldState requires n_max >= 1") {
  CHECK_THROWS_AS(FieldState({Complex(1.0, 0.0)}), ConfigError);
}

#include "jcm/stochastic.hpp"

#include <cmath>
#include <numbers>

#include "jcm/error.hpp"

namespace jcm {

double TimingModel::rms() const { return spread / std::sqrt(12.0); }

void TimingModel::validate() const {
  if (!(tau_bar > 0.0) || !std::isfinite(tau_bar)) throw ConfigError("tau_bar: must be > 0");
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw ConfigError("spread: must be >= 0");
  if (law == TimingLaw::Uniform && !(spread < 2.0 * tau_bar)) {
    throw ConfigError("spread: uniform law needs spread < 2 tau_bar to keep times positive");
  }
  if (!(ramsey_ratio >= 0.0)) throw ConfigError("ramsey_ratio: must be >= 0");
  if (!(decorrelation >= 0.0 && decorrelation <= 1.0)) {
    throw ConfigError("decorrelation: must lie in [0, 1]");
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phase);
  has_spare_ = true;
  return r * std::cos(phase);
}

RandomStream derive_stream(const SeedSpec& seed) {
  return RandomStream(mix64(seed.master_seed ^ mix64(seed.stream_id + 0x9e3779b97f4a7c15ULL)));
}

namespace {

double draw_tau(const TimingModel& model, RandomStream& rng) {
  if (model.spread == 0.0) return model.tau_bar;
  if (model.law == TimingLaw::Uniform) {
    return model.tau_bar + model.spread * (rng.uniform() - 0.5);
  }
  const double sigma = model.rms();
  double tau = 0.0;
  do {
    tau = model.tau_bar + sigma * rng.normal();
  } while (tau <= 0.0);
  return tau;
}

}  // namespace

TimingSample sample_timing(const TimingModel& model, RandomStream& rng) {
  model.validate();
  const double tau = draw_tau(model, rng);
  double driver = tau;
  if (model.decorrelation > 0.0) {
    driver = (1.0 - model.decorrelation) * tau + model.decorrelation * draw_tau(model, rng);
  }
  return {tau, model.ramsey_ratio * driver};
}

}  // namespace jcm

// jcmsim: repeated Jaynes-Cummings interactions with atomic measurements.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "jcm/config.hpp"
#include "jcm/error.hpp"

namespace {

using jcm::KeyValues;

/// Flags shared by run/sweep/preset; each maps onto one config key.
struct RunFlags {
  std::optional<std::string> scheme, update, alpha, dist, mode, spread_mult, spread_frac, omega,
      phi_f, coupling;
  std::optional<int> trap, q, fock, atoms, nmax;
  std::optional<std::uint64_t> seed, stream;
  std::optional<bool> halt;

  void attach(CLI::App& app) {
    app.add_option("--scheme", scheme, "nsm|elastic|inelastic|superposition")
        ->check(CLI::IsMember({"nsm", "elastic", "inelastic", "superposition"}));
    app.add_option("--update", update, "superposition update rule: large-n|exact")
        ->check(CLI::IsMember({"large-n", "exact"}));
    app.add_option("--trap", trap, "target trapping state n_t");
    app.add_option("--q", q, "trapping order q (theta_{n_t} = q pi)");
    app.add_option("--alpha", alpha, "coherent amplitude (real, or sqrtX)");
    app.add_option("--fock", fock, "start from Fock state |n>");
    app.add_option("--atoms", atoms, "number of atoms N");
    app.add_option("--spread-mult", spread_mult, "spread as a multiple of the critical spread");
    app.add_option("--spread-frac", spread_frac, "spread as a fraction of tau_bar");
    app.add_option("--dist", dist, "uniform|gaussian")->check(CLI::IsMember({"uniform", "gaussian"}));
    app.add_option("--mode", mode, "postselect|sample")->check(CLI::IsMember({"postselect", "sample"}));
    app.add_option("--omega", omega, "Ramsey Rabi frequency in units of g");
    app.add_option("--phi-f", phi_f, "Ramsey phase phi_f (rad)");
    app.add_option("--coupling", coupling, "coupling strength g");
    app.add_option("--nmax", nmax, "Fock truncation");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--stream", stream, "stream id");
    app.add_option("--halt-on-failure", halt, "sample mode: stop at first failure (true|false)");
  }

  KeyValues values() const {
    KeyValues v;
    auto put = [&v](const char* key, const auto& opt) {
      if (!opt) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) {
        v[key] = *opt;
      } else if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, bool>) {
        v[key] = *opt ? "true" : "false";
      } else {
        v[key] = std::to_string(*opt);
      }
    };
    put("scheme", scheme);
    put("update", update);
    put("trap", trap);
    put("q", q);
    put("alpha", alpha);
    put("fock", fock);
    put("atoms", atoms);
    put("spread_mult", spread_mult);
    put("spread_frac", spread_frac);
    put("law", dist);
    put("mode", mode);
    put("omega_g", omega);
    put("phi_f_rad", phi_f);
    put("coupling_g", coupling);
    put("nmax", nmax);
    put("seed", seed);
    put("stream", stream);
    put("halt_on_failure", halt);
    return v;
  }
};

/// A flag for spread or initial field replaces whatever the file/preset chose.
KeyValues apply_overrides(KeyValues base, const KeyValues& flags) {
  if (flags.contains("spread_mult") || flags.contains("spread_frac")) {
    base.erase("spread");
    base.erase("spread_inv_g");
    base.erase("spread_frac");
    base.erase("spread_mult");
  }
  if (flags.contains("fock") || flags.contains("alpha")) {
    base.erase("fock");
    base.erase("alpha");
    base.erase("alpha_im");
    base.erase("nmax");
  }
  if (flags.contains("omega_g")) base.erase("omega");
  if (flags.contains("trap") || flags.contains("q") || flags.contains("coupling_g")) {
    base.erase("tau_bar");
    base.erase("tau_bar_inv_g");
    base.erase("nmax");
    base.erase("ramsey_ratio");
  }
  return jcm::merge(base, flags);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int report(const jcm::Manifest& m, const std::string& out_dir) {
  std::cout << "wrote";
  for (const auto& f : m.outputs) std::cout << ' ' << f.name;
  std::cout << " manifest.txt to " << out_dir << '\n';
  if (m.terminated_early) std::cerr << "terminated early: " << m.termination_reason << '\n';
  return m.exit_code();
}

int execute(KeyValues values, const std::string& out_dir, unsigned threads = 0) {
  const auto start = std::chrono::steady_clock::now();
  const std::string command = values.contains("command") ? values["command"] : "run";
  if (command == "classical") {
    const auto config = jcm::parse_classical_config(values);
    const auto steps = jcm::classical_run(config.epsilon0, config.n_steps, config.timing,
                                          config.coupling, config.seed);
    if (!steps.empty()) {
      std::cout << "final eps^2/4 = " << jcm::format_real(steps.back().eps_sq_over_4) << '\n';
    }
    return report(jcm::write_outputs(config, steps, out_dir, seconds_since(start)), out_dir);
  }
  if (command == "sweep") {
    const auto config = jcm::parse_sweep_config(values);
    const auto table = jcm::sweep(config.base, config.multipliers, config.ensemble, threads);
    for (const auto& s : table.summary) {
      std::cout << "spread x" << jcm::format_real(s.multiplier)
                << ": median P(n_t) = " << jcm::format_real(s.median_final_p_trap)
                << ", median cum_P = " << jcm::format_real(s.median_cum_prob)
                << ", converged fraction = " << jcm::format_real(s.convergence_fraction) << '\n';
    }
    return report(jcm::write_outputs(config, table, out_dir, seconds_since(start)), out_dir);
  }
  if (command != "run") throw jcm::ConfigError("command: unknown '" + command + "'");
  const auto config = jcm::parse_run_config(values);
  const auto result = jcm::run_sequence(config);
  const auto s = jcm::stats(std::span<const double>(result.final_distribution));
  std::cout << "final <n> = " << jcm::format_real(s.mean_n)
            << ", Delta n = " << jcm::format_real(s.delta_n)
            << ", P(n_t) = " << jcm::format_real(result.final_distribution[config.trap_target])
            << ", cum_P = " << jcm::format_real(result.cum_prob()) << '\n';
  return report(jcm::write_outputs(config, result, out_dir, seconds_since(start)), out_dir);
}

KeyValues load(const std::optional<std::string>& config_path) {
  return config_path ? jcm::read_config_file(*config_path) : KeyValues{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated Jaynes-Cummings interactions with conditional atomic measurements"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::optional<std::string> config_path;

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "simulate one atom sequence");
  run->add_option("--config", config_path, "key = value config file (or manifest)");
  run->add_option("--out-dir", out_dir, "output directory");
  run_flags.attach(*run);

  RunFlags sweep_flags;
  std::optional<std::string> multipliers;
  std::optional<int> ensemble;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "spread sweep over an ensemble of seeds");
  sweep->add_option("--config", config_path, "key = value config file (or manifest)");
  sweep->add_option("--out-dir", out_dir, "output directory");
  sweep->add_option("--multipliers", multipliers, "comma-separated spread multiples of the critical spread");
  sweep->add_option("--ensemble", ensemble, "runs per multiplier");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware count); results do not depend on it");
  sweep_flags.attach(*sweep);

  std::optional<double> eps0, eps4, g_tau, spread_frac;
  std::optional<int> classical_atoms;
  std::optional<std::string> classical_dist;
  std::optional<std::uint64_t> classical_seed;
  auto* classical = app.add_subcommand("classical", "driven-pendulum return map");
  classical->add_option("--config", config_path, "key = value config file (or manifest)");
  classical->add_option("--out-dir", out_dir, "output directory");
  classical->add_option("--epsilon0", eps0, "initial field epsilon");
  classical->add_option("--eps-sq-over-4", eps4, "initial epsilon^2/4");
  classical->add_option("--g-tau", g_tau, "mean g tau");
  classical->add_option("--spread-frac", spread_frac, "spread as a fraction of tau_bar");
  classical->add_option("--atoms", classical_atoms, "number of iterations");
  classical->add_option("--dist", classical_dist, "uniform|gaussian")
      ->check(CLI::IsMember({"uniform", "gaussian"}));
  classical->add_option("--seed", classical_seed, "master seed");

  bool list = false;
  std::optional<std::string> preset_name;
  RunFlags preset_flags;
  auto* preset = app.add_subcommand("preset", "run (or list) a named preset");
  preset->add_flag("--list", list, "list preset names");
  preset->add_option("name", preset_name, "preset name");
  preset->add_option("--out-dir", out_dir, "output directory");
  preset_flags.attach(*preset);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto values = apply_overrides(load(config_path), run_flags.values());
      values["command"] = "run";
      return execute(values, out_dir);
    }
    if (*sweep) {
      auto flags = sweep_flags.values();
      if (multipliers) flags["multipliers"] = *multipliers;
      if (ensemble) flags["ensemble"] = std::to_string(*ensemble);
      auto values = apply_overrides(load(config_path), flags);
      values["command"] = "sweep";
      return execute(values, out_dir, threads);
    }
    if (*classical) {
      KeyValues flags;
      if (eps0) flags["epsilon0"] = jcm::format_real(*eps0);
      if (eps4) flags["eps_sq_over_4"] = jcm::format_real(*eps4);
      if (g_tau) flags["g_tau_bar"] = jcm::format_real(*g_tau);
      if (spread_frac) flags["spread_frac"] = jcm::format_real(*spread_frac);
      if (classical_atoms) flags["atoms"] = std::to_string(*classical_atoms);
      if (classical_dist) flags["law"] = *classical_dist;
      if (classical_seed) flags["seed"] = std::to_string(*classical_seed);
      auto values = load(config_path);
      if (eps0 || eps4) {
        values.erase("epsilon0");
        values.erase("eps_sq_over_4");
      }
      if (g_tau) {
        values.erase("tau_bar");
        values.erase("tau_bar_inv_g");
      }
      if (spread_frac) {
        values.erase("spread");
        values.erase("spread_inv_g");
      }
      values = jcm::merge(values, flags);
      values["command"] = "classical";
      return execute(values, out_dir);
    }
    if (list || !preset_name) {
      for (const auto& p : jcm::presets()) std::cout << p.name << "\t" << p.description << '\n';
      return 0;
    }
    const auto& p = jcm::preset(*preset_name);
    return execute(apply_overrides(p.values, preset_flags.values()), out_dir);
  } catch (const jcm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

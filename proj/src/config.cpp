#include "jcm/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "jcm/error.hpp"

namespace jcm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

const std::string* find(const KeyValues& values, const std::string& key) {
  const auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

double get_real(const KeyValues& values, const std::string& key, double fallback) {
  const auto* v = find(values, key);
  return v ? parse_real(key, *v) : fallback;
}

long long get_integer(const KeyValues& values, const std::string& key, long long fallback) {
  const auto* v = find(values, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long out = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + *v + "'");
  }
}

int get_int(const KeyValues& values, const std::string& key, int fallback) {
  const long long v = get_integer(values, key, fallback);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t get_u64(const KeyValues& values, const std::string& key) {
  const auto* v = find(values, key);
  if (!v) return 0;
  try {
    std::size_t used = 0;
    if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument(*v);
    const auto out = std::stoull(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative 64-bit integer, got '" + *v + "'");
  }
}

bool get_bool(const KeyValues& values, const std::string& key, bool fallback) {
  const auto* v = find(values, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + *v + "'");
}

std::string get_choice(const KeyValues& values, const std::string& key,
                       std::initializer_list<std::string_view> choices, std::string fallback) {
  const auto* v = find(values, key);
  if (!v) return fallback;
  for (auto c : choices) {
    if (*v == c) return *v;
  }
  std::string msg = key + ": '" + *v + "' is not one of {";
  bool first = true;
  for (auto c : choices) {
    msg += (first ? "" : "|") + std::string(c);
    first = false;
  }
  throw ConfigError(msg + "}");
}

void reject_unknown(const KeyValues& values, const std::set<std::string>& allowed,
                    std::string_view what) {
  for (const auto& [key, value] : values) {
    if (!allowed.contains(key)) {
      throw ConfigError(key + ": unknown key for " + std::string(what));
    }
  }
}

const std::set<std::string> kRunKeys = {
    "command", "scheme",  "update",   "phi_f_rad",    "trap",         "q",
    "alpha",   "alpha_im", "fock",    "atoms",        "coupling_g",   "tau_bar_inv_g",
    "spread_inv_g", "spread_frac", "spread_mult", "law", "decorrelation", "ramsey_ratio",
    "omega_g", "mode",    "halt_on_failure", "nmax",  "seed",         "stream",
    "tau_bar", "spread",  "omega"};

std::set<std::string> sweep_keys() {
  auto keys = kRunKeys;
  keys.insert({"multipliers", "ensemble"});
  return keys;
}

const std::set<std::string> kClassicalKeys = {
    "command", "epsilon0", "eps_sq_over_4", "atoms", "coupling_g", "tau_bar_inv_g", "g_tau_bar",
    "spread_inv_g", "spread_frac", "law", "decorrelation", "seed", "stream", "tau_bar", "spread"};

TimingLaw parse_law(const KeyValues& values) {
  return get_choice(values, "law", {"uniform", "gaussian"}, "uniform") == "gaussian"
             ? TimingLaw::Gaussian
             : TimingLaw::Uniform;
}

const char* law_name(TimingLaw law) {
  return law == TimingLaw::Gaussian ? "gaussian" : "uniform";
}

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Nsm: return "nsm";
    case SchemeKind::Elastic: return "elastic";
    case SchemeKind::Inelastic: return "inelastic";
    case SchemeKind::Superposition: return "superposition";
  }
  return "nsm";
}

// Absolute keys (tau_bar, spread, omega) are in the same time unit as 1/coupling_g.
// The echo writes them so that a manifest replays bit for bit.
void exclusive(const KeyValues& values, const char* a, const char* b) {
  if (find(values, a) && find(values, b)) throw ConfigError(std::string(a) + ": cannot combine with " + b);
}

/// spread wins over spread_inv_g, spread_frac (of tau_bar), then spread_mult.
double resolve_spread(const KeyValues& values, double g, double tau_bar, double critical) {
  exclusive(values, "spread", "spread_inv_g");
  if (find(values, "spread")) return get_real(values, "spread", 0.0);
  if (find(values, "spread_inv_g")) return get_real(values, "spread_inv_g", 0.0) / g;
  if (find(values, "spread_frac")) return get_real(values, "spread_frac", 0.0) * tau_bar;
  const double mult = get_real(values, "spread_mult", 0.0);
  if (!(mult >= 0.0)) throw ConfigError("spread_mult: must be >= 0");
  return mult * critical;
}

RunConfig parse_run_fields(const KeyValues& values) {
  RunConfig c;
  const auto scheme = get_choice(values, "scheme", {"nsm", "elastic", "inelastic", "superposition"}, "");
  if (scheme.empty()) throw ConfigError("scheme: required (nsm|elastic|inelastic|superposition)");
  if (!find(values, "trap")) throw ConfigError("trap: required for scheme " + scheme);
  c.trap_target = get_int(values, "trap", 0);
  c.q = get_int(values, "q", 1);
  c.coupling.g = get_real(values, "coupling_g", 1.0);
  c.coupling.validate();
  if (c.trap_target < 0) throw ConfigError("trap: must be >= 0");
  if (c.q < 1) throw ConfigError("q: must be >= 1 (q = 0 gives identity dynamics)");

  if (scheme == "nsm") {
    c.scheme = MeasurementScheme::nsm();
  } else if (scheme == "elastic") {
    c.scheme = MeasurementScheme::elastic();
  } else if (scheme == "inelastic") {
    c.scheme = MeasurementScheme::inelastic();
  } else {
    c.scheme.kind = SchemeKind::Superposition;
    c.scheme.update = get_choice(values, "update", {"large-n", "exact"}, "large-n") == "exact"
                          ? SuperpositionUpdate::Exact
                          : SuperpositionUpdate::LargeN;
    c.scheme.phi_f = get_real(values, "phi_f_rad", -std::numbers::pi / 2);
    exclusive(values, "omega", "omega_g");
    c.omega = find(values, "omega") ? get_real(values, "omega", 0.0)
                                    : get_real(values, "omega_g", 1.0) * c.coupling.g;
  }

  const bool has_fock = find(values, "fock") != nullptr;
  const bool has_alpha = find(values, "alpha") || find(values, "alpha_im");
  if (has_fock && has_alpha) throw ConfigError("fock: cannot combine with alpha");
  if (has_fock) {
    c.initial = InitialField::fock(get_int(values, "fock", 0));
  } else if (has_alpha) {
    c.initial = InitialField::coherent({get_real(values, "alpha", 0.0), get_real(values, "alpha_im", 0.0)});
  } else {
    throw ConfigError("alpha: initial field required (set alpha or fock)");
  }

  c.n_atoms = get_int(values, "atoms", 0);
  c.timing.law = parse_law(values);
  c.timing.decorrelation = get_real(values, "decorrelation", 0.0);
  exclusive(values, "tau_bar", "tau_bar_inv_g");
  if (find(values, "tau_bar")) {
    c.timing.tau_bar = get_real(values, "tau_bar", 0.0);
  } else if (find(values, "tau_bar_inv_g")) {
    c.timing.tau_bar = get_real(values, "tau_bar_inv_g", 0.0) / c.coupling.g;
  } else {
    c.timing.tau_bar = trapping_time(c.trap_target, c.q, c.coupling);
  }
  c.timing.spread = resolve_spread(values, c.coupling.g, c.timing.tau_bar,
                                   critical_spread(c.trap_target, c.coupling));
  if (c.scheme.kind == SchemeKind::Superposition) {
    const double r = find(values, "ramsey_ratio")
                         ? get_real(values, "ramsey_ratio", 0.0)
                         : stationary_phase_ratio(c.trap_target, c.omega, c.coupling);
    c.scheme.ramsey_ratio = r;
    c.timing.ramsey_ratio = r;
  } else {
    c.timing.ramsey_ratio = get_real(values, "ramsey_ratio", 0.0);
  }

  c.mode = get_choice(values, "mode", {"postselect", "sample"}, "postselect") == "sample"
               ? RunMode::Sampled
               : RunMode::PostSelected;
  c.halt_on_failure = get_bool(values, "halt_on_failure", true);
  c.n_max = get_int(values, "nmax",
                    c.initial.kind == InitialField::Kind::Coherent
                        ? default_n_max(c.trap_target, c.initial.alpha)
                        : default_n_max(c.trap_target));
  c.seed = {get_u64(values, "seed"), get_u64(values, "stream")};
  c.validate();

  if (c.initial.kind == InitialField::Kind::Coherent) {
    // Surfaces truncation failures as config errors.
    try {
      (void)coherent_state(c.initial.alpha, c.n_max);
    } catch (const LeakageError& e) {
      throw ConfigError(std::string("nmax: ") + e.what());
    }
  }
  return c;
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    if (!section.empty() && section != "config") continue;
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return read_key_values(in);
}

std::string to_text(const KeyValues& values) {
  std::string out;
  for (const auto& [k, v] : values) out += k + " = " + v + "\n";
  return out;
}

KeyValues merge(const KeyValues& base, const KeyValues& overrides) {
  KeyValues out = base;
  for (const auto& [k, v] : overrides) out[k] = v;
  return out;
}

double parse_real(std::string_view key, std::string_view text) {
  std::string s = trim(text);
  double scale = 1.0;
  bool root = false;
  if (s.rfind("sqrt", 0) == 0) {
    root = true;
    s = s.substr(4);
  } else if (s.rfind("-sqrt", 0) == 0) {
    root = true;
    scale = -1.0;
    s = s.substr(5);
  }
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    if (root) {
      if (v < 0.0) throw std::invalid_argument(s);
      v = std::sqrt(v);
    }
    if (!std::isfinite(v)) throw std::invalid_argument(s);
    return scale * v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(key) + ": expected a real number or sqrtX, got '" +
                      std::string(text) + "'");
  }
}

RunConfig parse_run_config(const KeyValues& values) {
  reject_unknown(values, kRunKeys, "run");
  return parse_run_fields(values);
}

SweepConfig parse_sweep_config(const KeyValues& values) {
  reject_unknown(values, sweep_keys(), "sweep");
  KeyValues run_values = values;
  run_values.erase("multipliers");
  run_values.erase("ensemble");
  SweepConfig c;
  c.base = parse_run_fields(run_values);
  const auto* list = find(values, "multipliers");
  if (!list) throw ConfigError("multipliers: required for sweep (comma-separated spread multiples)");
  std::stringstream ss(*list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double m = parse_real("multipliers", item);
    if (!(m >= 0.0)) throw ConfigError("multipliers: values must be >= 0");
    c.multipliers.push_back(m);
  }
  if (c.multipliers.empty()) throw ConfigError("multipliers: list is empty");
  c.ensemble = get_int(values, "ensemble", 1);
  if (c.ensemble < 1) throw ConfigError("ensemble: must be >= 1");
  return c;
}

ClassicalConfig parse_classical_config(const KeyValues& values) {
  reject_unknown(values, kClassicalKeys, "classical");
  ClassicalConfig c;
  c.coupling.g = get_real(values, "coupling_g", 1.0);
  c.coupling.validate();
  if (find(values, "epsilon0") && find(values, "eps_sq_over_4")) {
    throw ConfigError("epsilon0: cannot combine with eps_sq_over_4");
  }
  if (find(values, "eps_sq_over_4")) {
    const double e4 = get_real(values, "eps_sq_over_4", 0.0);
    if (!(e4 > 0.0)) throw ConfigError("eps_sq_over_4: must be > 0");
    c.epsilon0 = 2.0 * std::sqrt(e4);
  } else if (find(values, "epsilon0")) {
    c.epsilon0 = get_real(values, "epsilon0", 0.0);
  } else {
    throw ConfigError("epsilon0: initial field required (set epsilon0 or eps_sq_over_4)");
  }
  if (!(c.epsilon0 > 0.0)) throw ConfigError("epsilon0: must be > 0");
  c.n_steps = get_int(values, "atoms", 0);
  if (c.n_steps < 0) throw ConfigError("atoms: must be >= 0");
  exclusive(values, "g_tau_bar", "tau_bar_inv_g");
  exclusive(values, "tau_bar", "g_tau_bar");
  exclusive(values, "tau_bar", "tau_bar_inv_g");
  if (find(values, "tau_bar")) {
    c.timing.tau_bar = get_real(values, "tau_bar", 0.0);
  } else if (find(values, "g_tau_bar")) {
    c.timing.tau_bar = get_real(values, "g_tau_bar", 0.0) / c.coupling.g;
  } else if (find(values, "tau_bar_inv_g")) {
    c.timing.tau_bar = get_real(values, "tau_bar_inv_g", 0.0) / c.coupling.g;
  } else {
    throw ConfigError("g_tau_bar: mean interaction time required (g_tau_bar, tau_bar_inv_g or tau_bar)");
  }
  c.timing.law = parse_law(values);
  c.timing.decorrelation = get_real(values, "decorrelation", 0.0);
  exclusive(values, "spread", "spread_inv_g");
  if (find(values, "spread")) {
    c.timing.spread = get_real(values, "spread", 0.0);
  } else if (find(values, "spread_inv_g")) {
    c.timing.spread = get_real(values, "spread_inv_g", 0.0) / c.coupling.g;
  } else {
    c.timing.spread = get_real(values, "spread_frac", 0.0) * c.timing.tau_bar;
  }
  c.timing.validate();
  c.seed = {get_u64(values, "seed"), get_u64(values, "stream")};
  return c;
}

KeyValues echo(const RunConfig& c) {
  KeyValues v;
  v["scheme"] = scheme_name(c.scheme.kind);
  if (c.scheme.kind == SchemeKind::Superposition) {
    v["update"] = c.scheme.update == SuperpositionUpdate::Exact ? "exact" : "large-n";
    v["phi_f_rad"] = format_real(c.scheme.phi_f);
    v["omega"] = format_real(c.omega);
  }
  v["trap"] = std::to_string(c.trap_target);
  v["q"] = std::to_string(c.q);
  if (c.initial.kind == InitialField::Kind::Fock) {
    v["fock"] = std::to_string(c.initial.fock_n);
  } else {
    v["alpha"] = format_real(c.initial.alpha.real());
    v["alpha_im"] = format_real(c.initial.alpha.imag());
  }
  v["atoms"] = std::to_string(c.n_atoms);
  v["coupling_g"] = format_real(c.coupling.g);
  v["tau_bar"] = format_real(c.timing.tau_bar);
  v["spread"] = format_real(c.timing.spread);
  v["law"] = law_name(c.timing.law);
  v["decorrelation"] = format_real(c.timing.decorrelation);
  v["ramsey_ratio"] = format_real(c.timing.ramsey_ratio);
  v["mode"] = c.mode == RunMode::Sampled ? "sample" : "postselect";
  v["halt_on_failure"] = c.halt_on_failure ? "true" : "false";
  v["nmax"] = std::to_string(c.n_max);
  v["seed"] = std::to_string(c.seed.master_seed);
  v["stream"] = std::to_string(c.seed.stream_id);
  return v;
}

KeyValues echo(const SweepConfig& c) {
  KeyValues v = echo(c.base);
  std::string list;
  for (std::size_t i = 0; i < c.multipliers.size(); ++i) {
    list += (i ? "," : "") + format_real(c.multipliers[i]);
  }
  v["multipliers"] = list;
  v["ensemble"] = std::to_string(c.ensemble);
  return v;
}

KeyValues echo(const ClassicalConfig& c) {
  KeyValues v;
  v["epsilon0"] = format_real(c.epsilon0);
  v["atoms"] = std::to_string(c.n_steps);
  v["coupling_g"] = format_real(c.coupling.g);
  v["tau_bar"] = format_real(c.timing.tau_bar);
  v["spread"] = format_real(c.timing.spread);
  v["law"] = law_name(c.timing.law);
  v["decorrelation"] = format_real(c.timing.decorrelation);
  v["seed"] = std::to_string(c.seed.master_seed);
  v["stream"] = std::to_string(c.seed.stream_id);
  return v;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    const double g_tau_classical = 2.0 * std::numbers::pi / std::sqrt(199.0);
    const KeyValues fig1_quantum = {{"command", "run"}, {"scheme", "nsm"}, {"trap", "138"},
                                    {"q", "1"},         {"alpha", "3"},    {"atoms", "5000"},
                                    {"seed", "1"}};
    const KeyValues fig1_classical = {{"command", "classical"},
                                      {"eps_sq_over_4", "9"},
                                      {"g_tau_bar", format_real(g_tau_classical)},
                                      {"atoms", "100000"},
                                      {"seed", "1"}};
    const KeyValues fig2 = {{"command", "run"}, {"scheme", "elastic"}, {"trap", "20"},
                            {"alpha", "3"},     {"atoms", "2000"},     {"seed", "1"}};
    const KeyValues fig3 = {{"command", "run"},     {"scheme", "superposition"},
                            {"update", "large-n"},  {"trap", "21"},
                            {"alpha", "sqrt21"},    {"atoms", "2000"},
                            {"omega_g", "1"},       {"seed", "1"}};
    return std::vector<Preset>{
        {"fig1a", "NSM, fixed trapping times, n_t=138, alpha=3", fig1_quantum},
        {"fig1b", "NSM, 1% uniform time fluctuations, n_t=138, alpha=3",
         merge(fig1_quantum, {{"spread_frac", "0.01"}, {"nmax", "600"}})},
        {"fig1c", "classical return map, g tau = 2 pi/sqrt(199), eps^2/4 = 9", fig1_classical},
        {"fig1d", "classical return map with 1% uniform fluctuations",
         merge(fig1_classical, {{"spread_frac", "0.01"}})},
        {"fig2a", "elastic CM, n_t=20, alpha=3, spread = critical/10",
         merge(fig2, {{"spread_mult", "0.1"}})},
        {"fig2b", "elastic CM, n_t=20, alpha=3, spread = critical",
         merge(fig2, {{"spread_mult", "1"}})},
        {"fig3ab", "superposition CM, n_t=21, alpha=sqrt21, spread = critical/10",
         merge(fig3, {{"spread_mult", "0.1"}})},
        {"fig3cd", "superposition CM, n_t=21, alpha=sqrt21, spread = 2 x critical",
         merge(fig3, {{"spread_mult", "2"}})},
        {"fig4", "final distribution after 2000 atoms, superposition CM, spread = 2 x critical",
         merge(fig3, {{"spread_mult", "2"}})},
    };
  }();
  return all;
}

const Preset& preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string valid;
  for (const auto& p : presets()) valid += (valid.empty() ? "" : ", ") + p.name;
  throw ConfigError("preset: unknown name '" + std::string(name) + "' (valid: " + valid + ")");
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + file.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest initialisation failed");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

template <typename Writer>
void emit(Manifest& m, const std::filesystem::path& dir, const std::string& name, Writer&& write) {
  {
    auto out = open_output(dir / name);
    write(out);
    if (!out) throw std::runtime_error("write failed for '" + (dir / name).string() + "'");
  }
  m.outputs.push_back({name, sha256_hex(dir / name)});
}

void finish(const Manifest& m, const std::filesystem::path& dir) {
  auto out = open_output(dir / "manifest.txt");
  write_manifest(out, m);
  if (!out) throw std::runtime_error("write failed for manifest");
}

}  // namespace

void write_manifest(std::ostream& out, const Manifest& m) {
  out << "# jcmsim run manifest; rerun with `jcmsim <command> --config manifest.txt`\n";
  out << "[manifest]\n";
  out << "artifact_version = " << m.version << '\n';
  out << "master_seed = " << m.master_seed << '\n';
  out << "wall_clock_seconds = " << format_real(m.wall_clock_seconds) << '\n';
  out << "status = " << (m.terminated_early ? "terminated_early" : "ok") << '\n';
  if (m.terminated_early) out << "termination_reason = " << m.termination_reason << '\n';
  out << "\n[config]\n" << to_text(m.config);
  out << "\n[outputs]\n";
  for (const auto& f : m.outputs) out << f.name << " = sha256:" << f.sha256 << '\n';
}

Manifest write_outputs(const RunConfig& config, const RunResult& result,
                       const std::filesystem::path& out_dir, double wall_clock_seconds) {
  std::filesystem::create_directories(out_dir);
  Manifest m;
  m.config = echo(config);
  m.config["command"] = "run";
  m.master_seed = config.seed.master_seed;
  m.wall_clock_seconds = wall_clock_seconds;
  m.terminated_early = result.terminated_early;
  m.termination_reason = result.termination_reason;
  emit(m, out_dir, "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, result.steps); });
  emit(m, out_dir, "distribution.csv",
       [&](std::ostream& o) { write_distribution_csv(o, result.final_distribution); });
  finish(m, out_dir);
  return m;
}

Manifest write_outputs(const ClassicalConfig& config, std::span<const ClassicalStep> steps,
                       const std::filesystem::path& out_dir, double wall_clock_seconds) {
  std::filesystem::create_directories(out_dir);
  Manifest m;
  m.config = echo(config);
  m.config["command"] = "classical";
  m.master_seed = config.seed.master_seed;
  m.wall_clock_seconds = wall_clock_seconds;
  emit(m, out_dir, "classical.csv", [&](std::ostream& o) { write_classical_csv(o, steps); });
  finish(m, out_dir);
  return m;
}

Manifest write_outputs(const SweepConfig& config, const SweepTable& table,
                       const std::filesystem::path& out_dir, double wall_clock_seconds) {
  std::filesystem::create_directories(out_dir);
  Manifest m;
  m.config = echo(config);
  m.config["command"] = "sweep";
  m.master_seed = config.base.seed.master_seed;
  m.wall_clock_seconds = wall_clock_seconds;
  emit(m, out_dir, "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, table); });
  emit(m, out_dir, "sweep_summary.csv", [&](std::ostream& o) {
    o << "multiplier,median_final_P_nt,median_cum_P,convergence_fraction,failed_cells\n";
    for (const auto& s : table.summary) {
      o << format_real(s.multiplier) << ',' << format_real(s.median_final_p_trap) << ','
        << format_real(s.median_cum_prob) << ',' << format_real(s.convergence_fraction) << ','
        << s.failed_cells << '\n';
    }
  });
  finish(m, out_dir);
  return m;
}

}  // namespace jcm

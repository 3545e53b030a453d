#include "flipchain/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace flipchain {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
  if (pos != v.size()) throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long i;
  try {
    i = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
  if (pos != v.size()) throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

std::string fmt(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ExperimentConfig;
  using S = const std::string&;
  auto dbl = [](double C::*outer) {
    return Field{[outer](const C& c) { return fmt(c.*outer); },
                 [outer](C& c, S v) { c.*outer = to_double("", v); }};
  };
  static const std::vector<std::pair<std::string, Field>> f = {
      {"experiment", {[](const C& c) { return c.experiment; }, [](C& c, S v) { c.experiment = v; }}},
      {"n", {[](const C& c) { return std::to_string(c.params.n); },
             [](C& c, S v) { c.params.n = static_cast<int>(to_int("n", v)); }}},
      {"gamma", {[](const C& c) { return fmt(c.params.gamma); }, [](C& c, S v) { c.params.gamma = to_double("gamma", v); }}},
      {"gamma_tilde", {[](const C& c) { return fmt(c.params.gamma_tilde); },
                       [](C& c, S v) { c.params.gamma_tilde = to_double("gamma_tilde", v); }}},
      {"t_minus", {[](const C& c) { return fmt(c.params.t_minus); },
                   [](C& c, S v) { c.params.t_minus = to_double("t_minus", v); }}},
      {"t_plus", {[](const C& c) { return fmt(c.params.t_plus); },
                  [](C& c, S v) { c.params.t_plus = to_double("t_plus", v); }}},
      {"tau_plus", {[](const C& c) { return fmt(c.params.tau_plus); },
                    [](C& c, S v) { c.params.tau_plus = to_double("tau_plus", v); }}},
      {"initial", {[](const C& c) { return c.initial; }, [](C& c, S v) { c.initial = v; }}},
      {"dtau", {[](const C& c) { return fmt(c.integrator.dtau); },
                [](C& c, S v) { c.integrator.dtau = to_double("dtau", v); }}},
      {"record_stride", {[](const C& c) { return std::to_string(c.integrator.record_stride); },
                         [](C& c, S v) { c.integrator.record_stride = static_cast<int>(to_int("record_stride", v)); }}},
      {"moments_dtau", dbl(&C::moments_dtau)},
      {"t_end", dbl(&C::t_end)},
      {"grid_m", {[](const C& c) { return std::to_string(c.grid.m); },
                  [](C& c, S v) { c.grid.m = static_cast<int>(to_int("grid_m", v)); }}},
      {"grid_dt", {[](const C& c) { return fmt(c.grid.dt); }, [](C& c, S v) { c.grid.dt = to_double("grid_dt", v); }}},
      {"test_function", {[](const C& c) { return c.test_function; }, [](C& c, S v) { c.test_function = v; }}},
      {"profile", {[](const C& c) { return c.profile; }, [](C& c, S v) { c.profile = v; }}},
      {"p_amplitude", dbl(&C::p_amplitude)},
      {"n_list", {[](const C& c) {
                    std::string s;
                    for (std::size_t i = 0; i < c.n_list.size(); ++i) s += (i ? "," : "") + std::to_string(c.n_list[i]);
                    return s;
                  },
                  [](C& c, S v) {
                    c.n_list.clear();
                    std::stringstream ss(v);
                    std::string item;
                    while (std::getline(ss, item, ','))
                      if (!trim(item).empty()) c.n_list.push_back(static_cast<int>(to_int("n_list", trim(item))));
                  }}},
      {"trajectories", {[](const C& c) { return std::to_string(c.trajectories); },
                        [](C& c, S v) { c.trajectories = static_cast<int>(to_int("trajectories", v)); }}},
      {"master_seed", {[](const C& c) { return std::to_string(c.master_seed); },
                       [](C& c, S v) { c.master_seed = static_cast<std::uint64_t>(to_int("master_seed", v)); }}},
      {"workers", {[](const C& c) { return std::to_string(c.workers); },
                   [](C& c, S v) { c.workers = static_cast<int>(to_int("workers", v)); }}},
      {"half_step_check", {[](const C& c) { return std::string(c.half_step_check ? "1" : "0"); },
                           [](C& c, S v) { c.half_step_check = to_bool("half_step_check", v); }}},
      {"output_dir", {[](const C& c) { return c.output_dir; }, [](C& c, S v) { c.output_dir = v; }}},
  };
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& [k, f] : fields())
    if (k == key) return f;
  throw std::invalid_argument("config: unknown key " + key);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

const std::vector<std::string>& initial_presets() {
  static const std::vector<std::string> p = {"local-gibbs", "equilibrium", "shock"};
  return p;
}

std::string config_get(const ExperimentConfig& cfg, const std::string& key) { return field(key).get(cfg); }

void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    field(key).set(cfg, trim(value));
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.find("unknown key") != std::string::npos) throw;
    throw std::invalid_argument("config: bad value for " + key + ": " + value);
  }
}

void ExperimentConfig::validate() const {
  params.validate();
  integrator.validate();
  grid.validate();
  if (std::find(initial_presets().begin(), initial_presets().end(), initial) == initial_presets().end())
    throw std::invalid_argument("config: unknown initial preset " + initial);
  test_function_preset(test_function);
  profile_preset(profile, FieldKind::Stretch, params);
  if (!(t_end >= 0)) throw std::invalid_argument("config: t_end must be non-negative");
  if (!(moments_dtau > 0)) throw std::invalid_argument("config: moments_dtau must be positive");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw std::invalid_argument("config: n_list entries must be >= 2");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("config: n_list must be strictly increasing");
  }
  if (trajectories < 1) throw std::invalid_argument("config: trajectories must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
}

std::string ExperimentConfig::to_text() const {
  std::string s;
  for (const auto& [k, f] : fields()) s += k + " = " + f.get(*this) + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
    config_set(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& file, ExperimentConfig base) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("config: cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.params.gamma = 1.0;
  c.params.gamma_tilde = 1.0;
  c.params.t_minus = 1.0;
  c.params.t_plus = 2.0;
  c.params.tau_plus = 0.5;
  if (experiment == "hydro_stretch" || experiment == "boundary_scalings") {
    c.n_list = {32, 64, 128, 256};
    c.t_end = 0.1;
  } else if (experiment == "hydro_energy") {
    c.n_list = {32, 64, 128};
    c.t_end = 0.1;
    c.grid = Grid1D{512, 1e-4};
  } else if (experiment == "equipartition") {
    c.n_list = {64, 128, 256};
    c.t_end = 0.01;
    c.initial = "shock";
    c.test_function = "sine";
  } else if (experiment == "mc_vs_oracle") {
    c.params.n = 16;
    c.t_end = 0.05;
    c.trajectories = 2000;
    c.integrator.record_stride = 64;
  } else if (experiment == "assumptions") {
    c.params.tau_plus = 0.0;
    c.n_list = {16, 32, 64, 128};
  } else if (experiment == "generator_identities") {
    c.params.n = 16;
    c.trajectories = 1000;
  } else if (experiment == "energy_balance") {
    c.params.n = 16;
  } else if (experiment == "spectral") {
    c.params.t_plus = 1.0;
    c.params.tau_plus = 0.0;
    c.n_list = {16, 64, 256};
  } else if (experiment == "pde") {
    c.grid = Grid1D{256, 1e-4};
  }
  c.integrator.t_end_macro = c.t_end;
  return c;
}

GibbsSpec initial_law(const std::string& preset, const ModelParams& params) {
  if (preset == "local-gibbs") return GibbsSpec::local_gibbs(params);
  if (preset == "equilibrium") return GibbsSpec::equilibrium(params.t_minus, 0.0);
  if (preset == "shock") {
    // Potential energy in excess on the left half, equipartitioned on the right.
    GibbsSpec g = GibbsSpec::local_gibbs(params);
    g.var_scale_r = [](double u) { return u < 0.5 ? 1.8 : 1.0; };
    g.var_scale_p = [](double u) { return u < 0.5 ? 0.2 : 1.0; };
    return g;
  }
  throw std::invalid_argument("initial_law: unknown preset " + preset);
}

}  // namespace flipchain

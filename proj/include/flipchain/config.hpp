#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flipchain/integrator.hpp"
#include "flipchain/model.hpp"
#include "flipchain/pde.hpp"

namespace flipchain {

// Flat run configuration. Text form is one "key = value" per line, '#' starts
// a comment. n_list is comma separated.
struct ExperimentConfig {
  std::string experiment = "hydro_stretch";
  ModelParams params;
  std::string initial = "local-gibbs";  // local-gibbs | equilibrium | shock
  IntegratorConfig integrator;
  double moments_dtau = 0.05;
  double t_end = 0.1;
  Grid1D grid{1024, 1e-4};
  std::string test_function = "parabola";
  std::string profile = "sine";  // initial mean stretch, a stretch profile preset
  double p_amplitude = 0.5;      // initial mean momentum p_amplitude * sin(2 pi u)
  std::vector<int> n_list{32, 64, 128, 256};
  int trajectories = 2000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  bool half_step_check = false;
  std::string output_dir;  // empty: nothing written

  void validate() const;
  // Canonical text, keys in config_keys() order.
  std::string to_text() const;
  // FNV-1a of to_text().
  std::uint64_t hash() const;
};

const std::vector<std::string>& config_keys();
const std::vector<std::string>& initial_presets();
std::string config_get(const ExperimentConfig& cfg, const std::string& key);
// Throws std::invalid_argument on unknown keys or malformed values.
void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value);

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& file, ExperimentConfig base = {});

// Defaults for a named experiment (n_list, horizon, grids).
ExperimentConfig default_config(const std::string& experiment);

// Initial law for the named preset at size params.n.
GibbsSpec initial_law(const std::string& preset, const ModelParams& params);

}  // namespace flipchain

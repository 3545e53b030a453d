#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flipchain/config.hpp"
#include "flipchain/moments.hpp"
#include "flipchain/scaling.hpp"
#include "flipchain/spectral.hpp"

namespace flipchain {

struct Metric {
  std::string name;
  double value = 0.0;
};

// gated = false marks report-only checks that do not enter pass().
struct Check {
  std::string name;
  bool pass = true;
  bool gated = true;
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string experiment;
  std::string claim;  // the statement under test, in words
  ExperimentConfig config;
  std::vector<Metric> metrics;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  bool pass() const;
  double metric(const std::string& name) const;  // throws if absent
  const Check& check(const std::string& name) const;
  // Fields: experiment, claim, config_hash, master_seed, params, config,
  // metrics[], checks[], warnings[], pass, seconds.
  std::string summary_json() const;
  // <dir>/<experiment>_summary.json and <dir>/<experiment>_<table>.csv.
  void write(const std::string& dir) const;
};

// Piecewise-constant embedding of a site profile v_0..v_n (value v_x on
// [x/(n+1), (x+1)/(n+1))) compared in L^2(0,1) with a function.
double embedded_l2_distance(const std::vector<double>& site_values, const std::function<double(double)>& f);
// Exact cell integrals int_{x/(n+1)}^{(x+1)/(n+1)} w(u) du by 5-point Gauss.
std::vector<double> cell_integrals(int n, const std::function<double(double)>& w);

Report exp_hydro_stretch(const ExperimentConfig& cfg);
Report exp_hydro_energy(const ExperimentConfig& cfg);
Report exp_equipartition(const ExperimentConfig& cfg);
Report exp_boundary_scalings(const ExperimentConfig& cfg);
Report exp_mc_vs_oracle(const ExperimentConfig& cfg);
Report exp_generator_identities(const ExperimentConfig& cfg);
Report exp_energy_balance(const ExperimentConfig& cfg);
Report exp_spectral(const ExperimentConfig& cfg);
Report exp_pde(const ExperimentConfig& cfg);

// Initial-data bounds across n. The initial moment state at each n comes
// from `initial`; `spectra`, when set, replaces the mean spectra.
Report assumptions_check(const std::function<MomentState(int)>& initial, const ModelParams& params,
                         const std::vector<int>& n_list,
                         const std::function<InitialSpectra(int)>& spectra = {});
// Config form: the initial preset from cfg.initial.
Report exp_assumptions(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();
Report run_experiment(const std::string& name, const ExperimentConfig& cfg);

}  // namespace flipchain

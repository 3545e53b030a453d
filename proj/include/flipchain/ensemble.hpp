#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "flipchain/integrator.hpp"

namespace flipchain {

struct EnsembleOptions {
  int n_traj = 100;
  std::uint64_t master_seed = 1;
  int workers = 1;
  bool with_second_moments = false;
};

// Profiles are indexed by site 0..n; mean_r[t][0] is the constant r_0 = 0.
struct EnsembleStats {
  int n = 0;
  int n_traj = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> mean_r, mean_p, energy_profile;
  std::vector<std::vector<double>> se_r, se_p, se_E;
  // Phase-vector second moments E[z z^T], their standard errors and C = M - m m^T.
  std::vector<Eigen::MatrixXd> second_moment, second_moment_se, cov;
  std::vector<Eigen::VectorXd> mean_phase, mean_phase_se;
  BoundaryIntegrals boundary_mean{}, boundary_se{};

  // Piecewise constant embedding: value at site x for u in [x/(n+1), (x+1)/(n+1)).
  double profile_r(std::size_t ti, double u) const;
  double profile_p(std::size_t ti, double u) const;
};

EnsembleStats run_ensemble(const GibbsSpec& spec, const IntegratorConfig& cfg, const ModelParams& params,
                           const EnsembleOptions& opt);

// Columns: t,x,mean_r,mean_p,mean_E,se_r,se_p,se_E
void write_ensemble_csv(const EnsembleStats& st, const std::string& path);

}  // namespace flipchain

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <vector>

#include "flipchain/model.hpp"

namespace flipchain {

// Means and second moments E[z z^T] of the phase vector z = (r_1..r_n, p_0..p_n).
struct MomentState {
  Eigen::VectorXd m;
  Eigen::MatrixXd M;
  double t_macro = 0.0;

  int n() const { return static_cast<int>(m.size() - 1) / 2; }
};

// Linear drift pieces, microscopic time units.
struct DriftSpec {
  Eigen::SparseMatrix<double> A0;  // Hamiltonian couplings and boundary damping
  Eigen::VectorXd Df;              // flip damping on the mean, -2 gamma on p rows
  Eigen::VectorXd b;               // tension forcing at p_n
  Eigen::VectorXd q;               // diagonal of the diffusion matrix Q
  int n = 0;
};

DriftSpec build_drift(const ModelParams& params);

// gamma * sum_x (J_x M J_x - M), J_x negating p_x.
Eigen::MatrixXd flip_term(const Eigen::MatrixXd& M, double gamma);

// Exact moments of a product Gaussian local Gibbs law.
MomentState moments_from_gibbs(const GibbsSpec& spec, const ModelParams& params);
// Deterministic start: M = m m^T.
MomentState moments_from_means(const Eigen::VectorXd& m, double t_macro = 0.0);

// RK4 in microscopic time at step close to dtau (adjusted to land on t_target).
MomentState evolve(const MomentState& ms, const ModelParams& params, double t_target, double dtau = 0.05);

// Mean-only evolution. The observer is called after every step with (t_macro, m),
// and once at the start.
using MeanObserver = std::function<void(double, const Eigen::VectorXd&)>;
Eigen::VectorXd evolve_means(const Eigen::VectorXd& m0, const ModelParams& params, double t0, double t_target,
                             double dtau = 0.05, const MeanObserver& obs = {});

// Same for the full moments, observer called every step.
using MomentObserver = std::function<void(const MomentState&)>;
MomentState evolve_observed(const MomentState& ms, const ModelParams& params, double t_target, double dtau,
                            const MomentObserver& obs);

Eigen::VectorXd stationary_mean(const ModelParams& params);

// 1/2 (E[p_x^2] + E[r_x^2]) for x = 0..n, r_0 = 0.
std::vector<double> energy_profile(const MomentState& ms);

Eigen::MatrixXd fluctuation_cov(const MomentState& ms);

// Columns: t,x,mean_r,mean_p,var_r,var_p,energy
void write_moments_csv(const std::vector<MomentState>& path, const std::string& file);

// Binary layout: int64 n, double t, (2n+1)^2 doubles of M row-major, then 2n+1 doubles of m.
void save_checkpoint(const MomentState& ms, const std::string& file);
MomentState load_checkpoint(const std::string& file);

}  // namespace flipchain

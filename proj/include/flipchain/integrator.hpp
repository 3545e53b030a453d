#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "flipchain/model.hpp"

namespace flipchain {

struct IntegratorConfig {
  double dtau = 0.05;          // microscopic step; macroscopic step is dtau/n^2
  double t_end_macro = 0.05;
  int record_stride = 1;       // micro-steps between recordings
  // Test-only switch: false freezes the Hamiltonian sub-step.
  bool hamiltonian = true;

  void validate() const;
  long long steps(int n) const;
};

// Probability of an odd number of Poisson(gamma*dtau) flips.
double flip_probability(double gamma, double dtau);

// One Strang step: OU half, Verlet, flips, OU half.
ChainState step(const ChainState& s, const IntegratorConfig& cfg, const ModelParams& params, std::mt19937_64& rng);
void step_inplace(ChainState& s, const IntegratorConfig& cfg, const ModelParams& params, std::mt19937_64& rng);

// Time integrals in macroscopic time, trapezoid on the micro grid.
enum BoundaryStat : int {
  kIntP0 = 0,
  kIntPn,
  kIntR1,
  kIntRnMinusTau,
  kIntP0SqMinusT,
  kIntPnSqMinusT,
  kIntJ01,
  kIntJnm1n,
  kIntP0P1,
  kIntPnm1Pn,
  kNumBoundaryStats
};
using BoundaryIntegrals = std::array<double, kNumBoundaryStats>;
const std::array<std::string, kNumBoundaryStats>& boundary_stat_names();

struct Trajectory {
  std::vector<double> times;          // macroscopic
  std::vector<ChainState> states;
  BoundaryIntegrals integrals{};
};

// Macroscopic recording times of run_trajectory started at t0.
std::vector<double> record_times(const IntegratorConfig& cfg, int n, double t0 = 0.0);

Trajectory run_trajectory(const ChainState& initial, const IntegratorConfig& cfg, const ModelParams& params,
                          std::mt19937_64& rng);

}  // namespace flipchain

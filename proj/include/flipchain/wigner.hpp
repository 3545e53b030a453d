#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

#include "flipchain/moments.hpp"

namespace flipchain {

// Fourier-Wigner fields over (eta, k), eta an integer offset in 0..n (taken
// modulo n+1), k = j/(n+1). Stored row-major: index eta*(n+1) + j.
struct WignerSet {
  int n = 0;
  double t_macro = 0.0;
  std::vector<std::complex<double>> Wplus, Wminus, Yplus, Yminus;

  int N() const { return n + 1; }
  std::size_t idx(int eta, int j) const;  // wraps both indices
};

// Built from the fluctuation covariance C (2n+1 square, phase layout).
WignerSet wigner_from_cov(const Eigen::MatrixXd& C, int n, double t_macro = 0.0);

// sum_eta (1/(n+1)) sum_k (|W+|^2 + |W-|^2 + |Y+|^2 + |Y-|^2)
double energy_functional(const WignerSet& ws);
// sum_eta (1/(n+1)) sum_k (|W+ - W-|^2 + |Y+ - Y-|^2)
double dissipation_sum(const WignerSet& ws);

// Smooth test function G(s,u) vanishing at u = 0 and u = 1.
struct TestFunction2D {
  std::function<double(double, double)> G;
  // Fourier coefficients G^(eta) = (1/(n+1)) sum_x G(s, x/n) exp(-2 pi i x eta/(n+1)).
  std::vector<std::complex<double>> coefficients(double s, int n) const;
  bool vanishes_at_boundary(double s) const;
};

struct CovPath {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> cov;
};

struct EquipartitionResult {
  double lattice = 0.0;  // int ds (1/(n+1)) sum_x G_x (E r~^2 - E p~^2)
  double fourier = 0.0;  // same through V = Y+ + Y- and Parseval
  bool boundary_ok = true;
};

EquipartitionResult equipartition_functional(const CovPath& path, const TestFunction2D& G, int n);

// Right-hand side of 1/2 dE~/dt (macroscopic time) from a moment state.
struct BalanceTerms {
  double thermostat = 0.0;
  double injection = 0.0;
  double boundary_dissipation = 0.0;
  double bulk_dissipation = 0.0;
  double total() const { return thermostat + injection + boundary_dissipation + bulk_dissipation; }
};
BalanceTerms balance_terms(const MomentState& ms, const ModelParams& params);

// Centered differences of E~ along equally spaced states (spacing dt, macroscopic)
// minus balance_terms; sup over interior records.
double wigner_balance_residual(const std::vector<MomentState>& path, const ModelParams& params, double dt);

}  // namespace flipchain

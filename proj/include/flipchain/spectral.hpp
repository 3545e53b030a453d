#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "flipchain/model.hpp"

namespace flipchain {

using cplx = std::complex<double>;

struct DispersionPoint {
  double k = 0.0;
  cplx lambda_plus, lambda_minus;
};

// Roots of lambda^2 + 2 gamma lambda + 4 sin^2(pi k), principal square root.
DispersionPoint dispersion(double k, double gamma);
cplx dispersion_poly(cplx lambda, double k, double gamma);

// Initial mean spectra r^(0,k), p^(0,k) on k = j/(n+1).
struct InitialSpectra {
  int n = 0;
  std::vector<cplx> r_hat, p_hat;

  // From a phase-layout mean vector (r_0 = 0 is prepended).
  static InitialSpectra from_means(const Eigen::VectorXd& m);
  // r^(k) = sum_j a_j cos(2 pi j k) + i b_j sin(2 pi j k), j >= 1, and the same
  // for p with (c, d). Zero average over k for r, as r_0 = 0 requires.
  static InitialSpectra fourier_series(int n, const std::vector<double>& a, const std::vector<double>& b,
                                       const std::vector<double>& c, const std::vector<double>& d);
  static InitialSpectra zero(int n);
};

struct SpectralEval {
  double eta = 0.0;
  cplx e_d, e_s, a_n, c_n, rho_d, pi_d, rho_s, pi_s;
};

SpectralEval eval_functions(double eta, int n, const ModelParams& params, const InitialSpectra& spec);

// Boundary functions at a complex Laplace variable (microscopic time units).
cplx e_d_at(cplx s, int n, const ModelParams& params);
cplx e_s_at(cplx s, int n, const ModelParams& params);

// c_n from the inverse Joukowski map. Throws std::domain_error when the
// branch is numerically ambiguous (|Phi| close to 1).
cplx c_closed_form(double eta, int n, double gamma);
cplx joukowski_inverse(cplx w);

double kernel_Q(int ell, double t, int n, double gamma);

struct BoundCheck {
  std::string bound;
  int n = 0;
  double fitted = 0.0;   // max of LHS/shape, or min for lower bounds
  bool finite = true;
  bool pass = true;      // per-n condition (finite, or the explicit inequality)
  bool gated = true;     // false for report-only rows
};

struct CertifyReport {
  std::vector<BoundCheck> rows;
  // max/min of fitted constants across n, per bound (gated bounds only).
  std::vector<std::pair<std::string, double>> drift;
  bool all_pass = true;
  std::string to_csv() const;
};

std::vector<double> default_eta_grid();

CertifyReport appendix_certify(const std::vector<int>& n_list, const std::vector<double>& eta_grid,
                               const ModelParams& params, const std::function<InitialSpectra(int)>& spectra);

struct LaplaceReport {
  std::vector<double> t;                 // macroscopic
  std::vector<double> diff_time, diff_laplace, sum_time, sum_laplace;
  double l2_diff = 0.0, l2_sum = 0.0;    // L^2[0, t*] discrepancies
  int nodes = 0;
  bool converged = true;
};

// p0 -/+ pn from the mean ODE and from the Bromwich inversion of the Laplace formulas.
LaplaceReport laplace_crosscheck(const ModelParams& params, const Eigen::VectorXd& m0, const std::vector<double>& t_grid,
                                 int nodes = 1 << 16);

}  // namespace flipchain

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "flipchain/spectral.hpp"

using namespace flipchain;
using std::numbers::pi;

namespace {

ModelParams base(int n) {
  ModelParams p;
  p.n = n;
  p.gamma = 1.0;
  p.gamma_tilde = 1.0;
  p.t_minus = 1.0;
  p.t_plus = 1.0;
  p.tau_plus = 0.0;
  return p;
}

InitialSpectra smooth_spectra(int n) {
  return InitialSpectra::fourier_series(n, {0.7, -0.3, 0.2, 0.1}, {0.5, 0.25, -0.1, 0.05}, {0.4, 0.2, -0.2, 0.1},
                                        {-0.3, 0.15, 0.1, 0.05});
}

}  // namespace

TEST(Dispersion, RootsOfPolynomial) {
  for (double g : {0.5, 1.0, 2.0})
    for (int n : {8, 33}) {
      for (int j = 0; j <= n; ++j) {
        const double k = double(j) / (n + 1);
        const DispersionPoint dp = dispersion(k, g);
        EXPECT_LE(std::abs(dispersion_poly(dp.lambda_plus, k, g)), 1e-12);
        EXPECT_LE(std::abs(dispersion_poly(dp.lambda_minus, k, g)), 1e-12);
        EXPECT_LE(dp.lambda_plus.real(), 1e-15);
        EXPECT_LE(dp.lambda_minus.real(), 1e-15);
      }
    }
}

TEST(Dispersion, ZeroFrequency) {
  const DispersionPoint dp = dispersion(0.0, 1.3);
  EXPECT_NEAR(std::abs(dp.lambda_minus), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(dp.lambda_plus + 2.6), 0.0, 1e-15);
}

// Oracle: eigenvalues of the 2x2 Fourier block of the periodic mean dynamics.
TEST(Dispersion, QuarterFrequency) {
  const DispersionPoint dp = dispersion(0.25, 1.0);
  Eigen::Matrix2cd A;
  const std::complex<double> e = std::exp(std::complex<double>(0, 2 * pi * 0.25));
  A << 0.0, 1.0 - 1.0 / e, e - 1.0, -2.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(A);
  for (auto lam : {dp.lambda_plus, dp.lambda_minus}) {
    const double d = std::min(std::abs(es.eigenvalues()[0] - lam), std::abs(es.eigenvalues()[1] - lam));
    EXPECT_LT(d, 1e-12);
  }
  EXPECT_NEAR(std::abs(dp.lambda_plus - std::complex<double>(-1, -1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(dp.lambda_minus - std::complex<double>(-1, 1)), 0.0, 1e-12);
}

TEST(Dispersion, RealRegionInequalities) {
  const double g = 2.0;
  for (int j = 0; j < 200; ++j) {
    const double k = j / 200.0;
    const double s2 = std::pow(std::sin(pi * k), 2);
    if (g * g < 4 * s2) continue;
    const DispersionPoint dp = dispersion(k, g);
    const double lp = dp.lambda_plus.real(), lm = dp.lambda_minus.real();
    EXPECT_GE(lp, -2 * g - 1e-12);
    EXPECT_LE(lp, -g + 1e-12);
    EXPECT_GE(lm, -4 * s2 / g - 1e-12);
    EXPECT_LE(lm, -2 * s2 / g + 1e-12);
  }
}

TEST(EvalFunctions, BasicProperties) {
  const int n = 32;
  ModelParams prm = base(n);
  EXPECT_THROW(eval_functions(0.0, n, prm, InitialSpectra::zero(n)), std::invalid_argument);
  InitialSpectra flat = InitialSpectra::zero(n);
  for (auto& v : flat.p_hat) v = 1.0;
  for (double eta : default_eta_grid()) {
    const SpectralEval ev = eval_functions(eta, n, prm, flat);
    EXPECT_EQ(std::abs(ev.rho_d), 0.0);
    EXPECT_GE(ev.e_s.real(), 1.0 - 1e-12);
    if (eta * eta > 8) EXPECT_LE(std::abs(ev.a_n), 2.0 / (eta * eta - 4) + 1e-12);
  }
}

TEST(EvalFunctions, LaplaceVariantsAgreeOnAxis) {
  const int n = 16;
  ModelParams prm = base(n);
  prm.gamma_tilde = 0.7;
  for (double eta : {0.01, 0.5, 3.0}) {
    const SpectralEval ev = eval_functions(eta, n, prm, InitialSpectra::zero(n));
    EXPECT_LE(std::abs(ev.e_d - e_d_at({0, eta}, n, prm)), 1e-12 * std::abs(ev.e_d));
    EXPECT_LE(std::abs(ev.e_s - e_s_at({0, eta}, n, prm)), 1e-12 * std::abs(ev.e_s));
  }
}

// Direct summation is the oracle for the closed form.
TEST(CClosedForm, MatchesDirectSum) {
  for (double g : {1.0, 0.5}) {
    ModelParams prm = base(8);
    prm.gamma = g;
    for (int n : {8, 64}) {
      prm.n = n;
      for (double eta : {0.01, 1.0, 10.0, -1.0}) {
        const std::complex<double> direct = eval_functions(eta, n, prm, InitialSpectra::zero(n)).c_n;
        const std::complex<double> closed = c_closed_form(eta, n, g);
        EXPECT_LE(std::abs(direct - closed), 1e-10 * std::max(1.0, std::abs(direct)))
            << "n=" << n << " eta=" << eta << " direct=" << direct << " closed=" << closed;
      }
    }
  }
}

TEST(CClosedForm, InverseJoukowskiRange) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(-5, 5);
  for (int i = 0; i < 200; ++i) {
    const std::complex<double> w(ud(rng), ud(rng));
    if (std::abs(w.imag()) < 1e-3) continue;
    const auto phi = joukowski_inverse(w);
    EXPECT_LT(std::abs(phi), 1.0);
    EXPECT_LE(std::abs(0.5 * (phi + 1.0 / phi) - w), 1e-10 * std::abs(w));
  }
}

TEST(CClosedForm, LargeEtaDecay) {
  const int n = 64;
  const double e1 = 100, e2 = 1000;
  const double slope = std::log(std::abs(c_closed_form(e2, n, 1.0)) / std::abs(c_closed_form(e1, n, 1.0))) / std::log(e2 / e1);
  EXPECT_GE(slope, -2.2);
  EXPECT_LE(slope, -1.8);
}

TEST(KernelQ, Basics) {
  const int n = 64;
  const double q0 = kernel_Q(0, 0.0, n, 1.0);
  EXPECT_GT(q0, 0.0);
  EXPECT_TRUE(std::isfinite(q0));
  double prev = INFINITY;
  for (double t : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const double q = kernel_Q(1, t, n, 1.0);
    EXPECT_LE(q, prev);
    prev = q;
  }
  EXPECT_THROW(kernel_Q(3, 0.0, n, 1.0), std::invalid_argument);
}

// The large-n kernel needs the lattice to resolve k ~ t^-1/2 at t = 10^4.
TEST(KernelQ, DecaySlope) {
  const int n = 1 << 14;
  const double t1 = 10, t2 = 1e4;
  const double slope = std::log(kernel_Q(2, t2, n, 1.0) / kernel_Q(2, t1, n, 1.0)) / std::log((1 + t2) / (1 + t1));
  EXPECT_GE(slope, -1.6);
  EXPECT_LE(slope, -1.4);
}

TEST(AppendixCertify, FlatSpectraPassRhoBounds) {
  const ModelParams prm = base(16);
  const CertifyReport rep =
      appendix_certify({16, 64}, default_eta_grid(), prm, [](int n) { return InitialSpectra::zero(n); });
  for (const auto& r : rep.rows)
    if (r.bound.find("rho") != std::string::npos) {
      EXPECT_TRUE(r.pass);
      EXPECT_EQ(r.fitted, 0.0);
    }
  EXPECT_NE(rep.to_csv().find("bound,n,fitted"), std::string::npos);
}

TEST(AppendixCertify, SmoothSpectraFinite) {
  const ModelParams prm = base(16);
  const CertifyReport rep = appendix_certify({16, 64, 256}, default_eta_grid(), prm, smooth_spectra);
  for (const auto& r : rep.rows) {
    EXPECT_TRUE(r.finite) << r.bound << " n=" << r.n;
    if (r.bound == "Re e_s >= 1") EXPECT_TRUE(r.pass) << r.n;
  }
  for (const auto& [b, d] : rep.drift) {
    if (b.find("e_d") != std::string::npos) continue;
    EXPECT_LE(d, 2.0) << b;
  }
}

TEST(LaplaceCrosscheck, ZeroDataIsZero) {
  ModelParams prm = base(8);
  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(0.005 * i);
  const LaplaceReport rep = laplace_crosscheck(prm, Eigen::VectorXd::Zero(phase_dim(8)), t, 1 << 10);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(rep.diff_time[i], 0.0);
    EXPECT_NEAR(rep.diff_laplace[i], 0.0, 1e-14);
    EXPECT_NEAR(rep.sum_laplace[i], 0.0, 1e-14);
  }
}

TEST(LaplaceCrosscheck, GenericInitialData) {
  ModelParams prm = base(16);
  prm.gamma = 0.8;
  prm.gamma_tilde = 1.3;
  prm.tau_plus = 0.6;
  const int n = 16;
  Eigen::VectorXd m0(phase_dim(n));
  for (int x = 1; x <= n; ++x) m0[r_index(n, x)] = std::sin(pi * x / n) + 0.6 * x / n;
  for (int x = 0; x <= n; ++x) m0[p_index(n, x)] = 0.5 * std::cos(2 * pi * x / n);
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(0.001 * i);
  std::vector<double> errs;
  for (int nodes : {1 << 12, 1 << 14, 1 << 16}) {
    const LaplaceReport rep = laplace_crosscheck(prm, m0, t, nodes);
    errs.push_back(rep.l2_diff + rep.l2_sum);
    if (nodes == (1 << 16)) {
      EXPECT_LT(rep.l2_diff, 1e-3);
      EXPECT_LT(rep.l2_sum, 1e-3);
      EXPECT_TRUE(rep.converged);
    }
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], errs[1]);
}

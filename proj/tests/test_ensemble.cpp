#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "flipchain/ensemble.hpp"

using namespace flipchain;

namespace {

ModelParams base(int n) {
  ModelParams p;
  p.n = n;
  p.gamma = 1.0;
  p.gamma_tilde = 1.0;
  p.t_minus = 1.0;
  p.t_plus = 2.0;
  p.tau_plus = 0.5;
  return p;
}

}  // namespace

TEST(RunEnsemble, EquilibriumMeansStayZero) {
  ModelParams prm = base(8);
  prm.t_plus = 1.0;
  prm.tau_plus = 0.0;
  IntegratorConfig cfg;
  cfg.t_end_macro = 0.05;
  cfg.record_stride = 16;
  EnsembleOptions opt;
  opt.n_traj = 800;
  opt.master_seed = 2024;
  const EnsembleStats st = run_ensemble(GibbsSpec::equilibrium(1.0), cfg, prm, opt);
  int total = 0, within = 0;
  double worst = 0;
  for (std::size_t t = 0; t < st.times.size(); ++t)
    for (int x = 0; x <= prm.n; ++x) {
      for (auto [m, se] : {std::pair{st.mean_p[t][x], st.se_p[t][x]}, std::pair{st.mean_r[t][x], st.se_r[t][x]}}) {
        if (se == 0) continue;  // r_0
        const double z = std::abs(m) / se;
        ++total;
        within += z <= 3.0;
        worst = std::max(worst, z);
      }
    }
  EXPECT_GE(static_cast<double>(within) / total, 0.98);
  EXPECT_LE(worst, 4.5);
}

TEST(RunEnsemble, SingleTrajectoryEqualsPath) {
  ModelParams prm = base(6);
  IntegratorConfig cfg;
  cfg.t_end_macro = 0.01;
  cfg.record_stride = 5;
  GibbsSpec spec = GibbsSpec::local_gibbs(prm);
  EnsembleOptions opt;
  opt.n_traj = 1;
  opt.master_seed = 99;
  opt.with_second_moments = true;
  const EnsembleStats st = run_ensemble(spec, cfg, prm, opt);

  std::mt19937_64 rng(derive_seed(99, 0));
  const ChainState init = sample_initial(spec, prm, rng);
  const Trajectory tr = run_trajectory(init, cfg, prm, rng);
  ASSERT_EQ(st.times.size(), tr.states.size());
  for (std::size_t t = 0; t < tr.states.size(); ++t) {
    for (int x = 0; x <= prm.n; ++x) {
      EXPECT_EQ(st.mean_p[t][x], tr.states[t].p[x]);
      EXPECT_EQ(st.mean_r[t][x], tr.states[t].rx(x));
    }
  }
  for (int i = 0; i < kNumBoundaryStats; ++i) EXPECT_EQ(st.boundary_mean[i], tr.integrals[i]);
}

TEST(RunEnsemble, WorkerCountInvariance) {
  ModelParams prm = base(10);
  IntegratorConfig cfg;
  cfg.t_end_macro = 0.01;
  cfg.record_stride = 10;
  EnsembleOptions opt;
  opt.n_traj = 300;
  opt.master_seed = 5;
  opt.with_second_moments = true;
  const GibbsSpec spec = GibbsSpec::local_gibbs(prm);
  opt.workers = 1;
  const EnsembleStats a = run_ensemble(spec, cfg, prm, opt);
  for (int w : {4, 8}) {
    opt.workers = w;
    const EnsembleStats b = run_ensemble(spec, cfg, prm, opt);
    ASSERT_EQ(a.times.size(), b.times.size());
    for (std::size_t t = 0; t < a.times.size(); ++t) {
      for (int x = 0; x <= prm.n; ++x) {
        EXPECT_NEAR(a.mean_p[t][x], b.mean_p[t][x], 1e-12);
        EXPECT_NEAR(a.energy_profile[t][x], b.energy_profile[t][x], 1e-12);
      }
      EXPECT_LE((a.second_moment[t] - b.second_moment[t]).cwiseAbs().maxCoeff(), 1e-12);
    }
    for (int i = 0; i < kNumBoundaryStats; ++i) EXPECT_NEAR(a.boundary_mean[i], b.boundary_mean[i], 1e-12);
  }
}

TEST(RunEnsemble, CovariancePsd) {
  ModelParams prm = base(6);
  IntegratorConfig cfg;
  cfg.t_end_macro = 0.02;
  cfg.record_stride = 50;
  EnsembleOptions opt;
  opt.n_traj = 200;
  opt.with_second_moments = true;
  const EnsembleStats st = run_ensemble(GibbsSpec::local_gibbs(prm), cfg, prm, opt);
  for (const auto& C : st.cov) {
    EXPECT_LE((C - C.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(RunEnsemble, ProfileEmbedding) {
  ModelParams prm = base(4);
  IntegratorConfig cfg;
  cfg.t_end_macro = 0.0;
  EnsembleOptions opt;
  opt.n_traj = 3;
  const EnsembleStats st = run_ensemble(GibbsSpec::local_gibbs(prm), cfg, prm, opt);
  EXPECT_EQ(st.profile_p(0, 0.0), st.mean_p[0][0]);
  EXPECT_EQ(st.profile_p(0, 0.199), st.mean_p[0][0]);
  EXPECT_EQ(st.profile_p(0, 0.2), st.mean_p[0][1]);
  EXPECT_EQ(st.profile_p(0, 0.99), st.mean_p[0][4]);
  EXPECT_EQ(st.profile_p(0, 1.0), st.mean_p[0][4]);
}

TEST(RunEnsemble, RejectsEmpty) {
  EnsembleOptions opt;
  opt.n_traj = 0;
  EXPECT_THROW(run_ensemble(GibbsSpec::equilibrium(1.0), IntegratorConfig{}, base(4), opt), std::invalid_argument);
}

// Bulk starts hotter than the left bath: the left boundary statistic
// int (p0^2 - T-) decreases in magnitude as n grows.
TEST(RunEnsemble, BoundaryTemperatureStatisticDecreases) {
  double prev = INFINITY;
  for (auto [n, ntraj] : {std::pair{32, 1200}, std::pair{64, 600}, std::pair{128, 300}}) {
    ModelParams prm = base(n);
    prm.t_minus = 1.0;
    prm.t_plus = 1.0;
    prm.tau_plus = 0.0;
    IntegratorConfig cfg;
    cfg.t_end_macro = 0.02;
    cfg.record_stride = 1 << 30;
    EnsembleOptions opt;
    opt.n_traj = ntraj;
    opt.master_seed = 31;
    const EnsembleStats st = run_ensemble(GibbsSpec::equilibrium(2.0), cfg, prm, opt);
    const double v = std::abs(st.boundary_mean[kIntP0SqMinusT]) + std::abs(st.boundary_mean[kIntPnSqMinusT]);
    EXPECT_LT(v, prev) << "n = " << n;
    prev = v;
  }
}

TEST(WriteEnsembleCsv, Columns) {
  ModelParams prm = base(3);
  IntegratorConfig cfg;
  cfg.t_end_macro = 0.0;
  EnsembleOptions opt;
  opt.n_traj = 2;
  const EnsembleStats st = run_ensemble(GibbsSpec::local_gibbs(prm), cfg, prm, opt);
  const std::string path = ::testing::TempDir() + "ens.csv";
  write_ensemble_csv(st, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x,mean_r,mean_p,mean_E,se_r,se_p,se_E");
  int rows = 0;
  for (std::string l; std::getline(in, l);) ++rows;
  EXPECT_EQ(rows, 4);
  std::remove(path.c_str());
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flipchain/model.hpp"

using namespace flipchain;

TEST(ModelParams, ValidateRejectsBadValues) {
  ModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.n = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.gamma = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.t_plus = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(EnergyDensity, ZeroState) {
  ChainState s(8);
  for (double e : energy_density(s)) EXPECT_EQ(e, 0.0);
}

TEST(EnergyDensity, UnitState) {
  ChainState s(6);
  for (auto& v : s.r) v = 1.0;
  for (auto& v : s.p) v = 1.0;
  const auto e = energy_density(s);
  EXPECT_DOUBLE_EQ(e[0], 0.5);
  for (int x = 1; x <= 6; ++x) EXPECT_DOUBLE_EQ(e[x], 1.0);
}

TEST(EnergyDensity, SumIsHamiltonian) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  ChainState s(20);
  double h = 0;
  for (auto& v : s.r) {
    v = nd(rng);
    h += 0.5 * v * v;
  }
  for (auto& v : s.p) {
    v = nd(rng);
    h += 0.5 * v * v;
  }
  double tot = 0;
  for (double e : energy_density(s)) tot += e;
  EXPECT_NEAR(tot, h, 1e-12);
}

TEST(Current, Values) {
  ChainState s(5);
  EXPECT_EQ(current(s, 2), 0.0);
  s.p[2] = 1.0;
  s.r[2] = 2.0;  // r_3
  EXPECT_DOUBLE_EQ(current(s, 2), -2.0);
  s.p[2] = -1.0;
  EXPECT_DOUBLE_EQ(current(s, 2), 2.0);
  EXPECT_THROW(current(s, 5), std::out_of_range);
  EXPECT_THROW(current(s, -1), std::out_of_range);
}

TEST(GibbsPotential, Values) {
  EXPECT_NEAR(gibbs_potential(2 * std::numbers::pi, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(gibbs_potential(1.0, 0.0), 0.918938533204673, 1e-12);
  EXPECT_NEAR(gibbs_potential(1.0, 2.0), 2.0 + 0.918938533204673, 1e-12);
  EXPECT_THROW(gibbs_potential(0.0, 1.0), std::invalid_argument);
}

// Oracle: log of the Gaussian integral int exp(-beta(r^2/2 - tau r)) dr by
// midpoint quadrature.
TEST(GibbsPotential, MatchesQuadrature) {
  for (auto [beta, tau] : {std::pair{1.0, 0.0}, std::pair{1.0, 2.0}, std::pair{0.7, -1.3}}) {
    const double h = 1e-3;
    double s = 0;
    for (double r = -40; r < 40; r += h) s += std::exp(-beta * ((r + h / 2) * (r + h / 2) / 2 - tau * (r + h / 2))) * h;
    EXPECT_NEAR(gibbs_potential(beta, tau), std::log(s), 1e-9);
  }
}

TEST(SampleInitial, StandardMoments) {
  ModelParams p;
  p.n = 4;
  GibbsSpec g = GibbsSpec::equilibrium(1.0, 0.0);
  std::mt19937_64 rng(11);
  const int N = 100000;
  double mr = 0, vp = 0, mp = 0;
  for (int i = 0; i < N; ++i) {
    ChainState s = sample_initial(g, p, rng);
    mr += s.r[1];
    mp += s.p[2];
    vp += s.p[2] * s.p[2];
  }
  mr /= N;
  mp /= N;
  vp = vp / N - mp * mp;
  EXPECT_NEAR(mr, 0.0, 0.02);
  EXPECT_NEAR(vp, 1.0, 0.02);
}

TEST(SampleInitial, TensionShiftsStretchMean) {
  ModelParams p;
  p.n = 4;
  GibbsSpec g = GibbsSpec::equilibrium(1.0, 1.0);
  std::mt19937_64 rng(5);
  const int N = 50000;
  double mr = 0;
  for (int i = 0; i < N; ++i) mr += sample_initial(g, p, rng).r[3];
  EXPECT_NEAR(mr / N, 1.0, 0.02);
}

TEST(SampleInitial, LinearBetaProfile) {
  ModelParams p;
  p.n = 8;
  p.t_minus = 1.0;
  p.t_plus = 2.0;
  GibbsSpec g = GibbsSpec::local_gibbs(p);
  std::mt19937_64 rng(9);
  const int N = 100000;
  double v0 = 0, vn = 0;
  for (int i = 0; i < N; ++i) {
    ChainState s = sample_initial(g, p, rng);
    v0 += s.p[0] * s.p[0];
    vn += s.p[8] * s.p[8];
  }
  EXPECT_NEAR(v0 / N, 1.0, 0.03);
  EXPECT_NEAR(vn / N, 2.0, 0.05);
}

// Chi-square goodness of fit of p_x against N(0,T) on 10 equiprobable bins,
// 1% level (critical value 21.67 for 9 degrees of freedom).
TEST(SampleInitial, ChiSquareAgainstGibbs) {
  ModelParams p;
  p.n = 4;
  const double T = 1.7;
  GibbsSpec g = GibbsSpec::equilibrium(T);
  std::mt19937_64 rng(21);
  const double edges[9] = {-1.2815515655446004, -0.8416212335729143, -0.5244005127080407, -0.2533471031357997, 0.0,
                           0.2533471031357997,  0.5244005127080407,  0.8416212335729143,  1.2815515655446004};
  const int N = 100000;
  for (int site = 0; site <= 4; site += 2) {
    int counts[10] = {0};
    for (int i = 0; i < N; ++i) {
      const double z = sample_initial(g, p, rng).p[site] / std::sqrt(T);
      int b = 0;
      while (b < 9 && z > edges[b]) ++b;
      ++counts[b];
    }
    double chi = 0;
    for (int c : counts) chi += (c - N / 10.0) * (c - N / 10.0) / (N / 10.0);
    EXPECT_LT(chi, 21.67) << "site " << site;
  }
}

TEST(SampleInitial, RejectsNonPositiveBeta) {
  ModelParams p;
  p.n = 4;
  GibbsSpec g;
  g.beta_profile = [](double u) { return u - 0.5; };
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_initial(g, p, rng), std::invalid_argument);
}

TEST(ChainState, PhaseRoundTrip) {
  ChainState s(3);
  s.r = {1, 2, 3};
  s.p = {4, 5, 6, 7};
  const auto z = s.phase();
  ASSERT_EQ(z.size(), 7u);
  EXPECT_EQ(z[r_index(3, 2)], 2);
  EXPECT_EQ(z[p_index(3, 0)], 4);
  const ChainState b = ChainState::from_phase(z);
  EXPECT_EQ(b.r, s.r);
  EXPECT_EQ(b.p, s.p);
  EXPECT_EQ(b.rx(0), 0.0);
}

TEST(DeriveSeed, DistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}

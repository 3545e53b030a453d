#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "flipchain/config.hpp"
#include "flipchain/experiments.hpp"
#include "flipchain/scaling.hpp"
#include "json.hpp"

using namespace flipchain;
using std::numbers::pi;

TEST(ScalingFit, RecoversPowerLaw) {
  const std::vector<double> x = {16, 32, 64, 128};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  const ScalingFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, -2.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
  EXPECT_TRUE(f.slope_in(-2.1, -1.9));
}

TEST(ScalingFit, LogCorrectionShiftsSlope) {
  std::vector<double> x, y;
  for (double v : {32.0, 64.0, 128.0, 256.0}) {
    x.push_back(v);
    y.push_back(std::pow(std::log(v + 1), 2) / (v * v));
  }
  const ScalingFit f = fit_loglog(x, y);
  EXPECT_GT(f.slope, -2.0);
  EXPECT_LT(f.slope, -1.5);
  EXPECT_GT(f.residual, 0.0);
}

TEST(ScalingFit, Preconditions) {
  EXPECT_THROW(fit_loglog({1, 2}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({1, 2, 3}, {1, 0, 2}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({1, 2, 3}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({2, 2, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST(ScalingHelpers, DecreasingAndSpread) {
  EXPECT_TRUE(strictly_decreasing({3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing({3, 3, 1}));
  EXPECT_DOUBLE_EQ(spread_ratio({2, 1, 4}), 4.0);
  EXPECT_TRUE(std::isinf(spread_ratio({1, 0})));
}

TEST(Config, ParseCommentsAndLists) {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "gamma = 0.7   # trailing\n"
      "n_list = 8, 16,32\n"
      "\n"
      "initial = shock\n"
      "half_step_check = true\n");
  EXPECT_DOUBLE_EQ(c.params.gamma, 0.7);
  EXPECT_EQ(c.n_list, (std::vector<int>{8, 16, 32}));
  EXPECT_EQ(c.initial, "shock");
  EXPECT_TRUE(c.half_step_check);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, TextRoundTripAndHash) {
  ExperimentConfig c = default_config("hydro_energy");
  c.params.gamma_tilde = 0.3;
  c.master_seed = 99;
  const ExperimentConfig d = parse_config(c.to_text());
  EXPECT_EQ(d.to_text(), c.to_text());
  EXPECT_EQ(d.hash(), c.hash());
  ExperimentConfig e = c;
  e.master_seed = 100;
  EXPECT_NE(e.hash(), c.hash());
  for (const auto& k : config_keys()) EXPECT_EQ(config_get(d, k), config_get(c, k)) << k;
}

TEST(Config, Errors) {
  ExperimentConfig c;
  EXPECT_THROW(config_set(c, "nope", "1"), std::invalid_argument);
  EXPECT_THROW(config_set(c, "gamma", "abc"), std::invalid_argument);
  EXPECT_THROW(config_set(c, "n", "3.5"), std::invalid_argument);
  EXPECT_THROW(parse_config("gamma 1.0\n"), std::invalid_argument);
  c.n_list = {32, 16};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.n_list = {16, 32};
  c.initial = "unknown";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.initial = "local-gibbs";
  c.profile = "unknown";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/file.cfg"), std::runtime_error);
}

TEST(Config, LoadFile) {
  const std::string path = ::testing::TempDir() + "fc.cfg";
  std::ofstream(path) << "tau_plus = 0.25\ntrajectories = 10\n";
  const ExperimentConfig c = load_config(path, default_config("mc_vs_oracle"));
  EXPECT_DOUBLE_EQ(c.params.tau_plus, 0.25);
  EXPECT_EQ(c.trajectories, 10);
  EXPECT_EQ(c.params.n, 16);
  std::filesystem::remove(path);
}

TEST(Config, InitialPresets) {
  ModelParams p;
  p.t_minus = 1.0;
  p.t_plus = 3.0;
  for (const auto& name : initial_presets()) EXPECT_NO_THROW(initial_law(name, p).validate()) << name;
  const GibbsSpec s = initial_law("shock", p);
  EXPECT_NEAR(s.r_var(0.25) / s.p_var(0.25), 9.0, 1e-12);
  EXPECT_NEAR(s.r_var(0.75), s.p_var(0.75), 1e-12);
  EXPECT_THROW(initial_law("nope", p), std::invalid_argument);
}

// Oracle: for a linear f, the cell-center embedding error is |slope| h / sqrt(12).
TEST(Embedding, L2DistanceOfLinearProfile) {
  const int n = 9;
  const double h = 1.0 / (n + 1);
  std::vector<double> v(n + 1);
  for (int x = 0; x <= n; ++x) v[x] = 2.0 * (x + 0.5) * h;
  EXPECT_NEAR(embedded_l2_distance(v, [](double u) { return 2.0 * u; }), 2.0 * h / std::sqrt(12.0), 1e-13);
  EXPECT_NEAR(embedded_l2_distance(std::vector<double>(5, 0.0), [](double) { return 1.0; }), 1.0, 1e-14);
}

TEST(Embedding, CellIntegrals) {
  const int n = 12;
  const auto c = cell_integrals(n, [](double u) { return u * (1 - u); });
  double total = 0;
  for (double v : c) total += v;
  EXPECT_NEAR(total, 1.0 / 6.0, 1e-14);
  const double a = 3.0 / (n + 1), b = 4.0 / (n + 1);
  auto F = [](double u) { return u * u / 2 - u * u * u / 3; };
  EXPECT_NEAR(c[3], F(b) - F(a), 1e-15);
}

TEST(Report, GatingAndJson) {
  Report r;
  r.experiment = "demo";
  r.claim = "a claim";
  r.metrics = {{"x", 1.5}, {"bad", INFINITY}};
  r.checks = {{"gated ok", true, true, ""}, {"report only", false, false, "info"}};
  EXPECT_TRUE(r.pass());
  EXPECT_DOUBLE_EQ(r.metric("x"), 1.5);
  EXPECT_THROW(r.metric("y"), std::out_of_range);
  const auto j = nlohmann::json::parse(r.summary_json());
  EXPECT_EQ(j["experiment"], "demo");
  EXPECT_EQ(j["metrics"].size(), 2u);
  EXPECT_TRUE(j["metrics"][1]["value"].is_string());
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["master_seed"], 1);
  EXPECT_TRUE(j.contains("config_hash"));
  r.checks.push_back({"gated fail", false, true, ""});
  EXPECT_FALSE(r.pass());

  r.tables.push_back({"t", {"a", "b"}, {{1, 2}, {3, 4}}});
  const std::string dir = ::testing::TempDir() + "fc_report";
  r.write(dir);
  EXPECT_TRUE(std::filesystem::exists(dir + "/demo_summary.json"));
  std::ifstream in(dir + "/demo_t.csv");
  std::string h;
  std::getline(in, h);
  EXPECT_EQ(h, "a,b");
  std::filesystem::remove_all(dir);
}

TEST(Experiments, GeneratorIdentitiesSmall) {
  ExperimentConfig c = default_config("generator_identities");
  c.params.n = 8;
  c.trajectories = 50;
  const Report r = exp_generator_identities(c);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.checks.size(), 4u);
}

TEST(Experiments, StretchStationaryStartAtEmbeddingFloor) {
  ExperimentConfig c = default_config("hydro_stretch");
  c.profile = "linear-tension";
  c.p_amplitude = 0.0;
  c.n_list = {8, 16, 32};
  c.t_end = 0.01;
  c.grid = Grid1D{256, 1e-4};
  const Report r = exp_hydro_stretch(c);
  // A linear profile sampled at x/n and embedded on cells of width 1/(n+1).
  for (int n : c.n_list) {
    const double floor = c.params.tau_plus * 1.0 / (n + 1);
    EXPECT_LE(r.metric("l2 error n=" + std::to_string(n)), floor) << n;
  }
  EXPECT_TRUE(r.check("error decreases over n_list").pass);
}

TEST(Experiments, BoundaryScalingsVanishForZeroData) {
  ExperimentConfig c = default_config("boundary_scalings");
  c.params.tau_plus = 0.0;
  c.profile = "linear-tension";
  c.p_amplitude = 0.0;
  c.n_list = {8, 16, 32};
  c.t_end = 0.01;
  const Report r = exp_boundary_scalings(c);
  for (const auto& row : r.tables[0].rows)
    for (std::size_t i = 1; i < row.size(); ++i) EXPECT_EQ(row[i], 0.0);
  EXPECT_FALSE(r.pass());
  EXPECT_NE(r.check("|int pn|").detail.find("no fit"), std::string::npos);
}

TEST(Experiments, EquipartitionVanishesAtEquilibrium) {
  ExperimentConfig c = default_config("equipartition");
  c.params.t_plus = c.params.t_minus;
  c.params.tau_plus = 0.0;
  c.initial = "equilibrium";
  c.n_list = {8, 16};
  c.t_end = 0.002;
  const Report r = exp_equipartition(c);
  for (int n : c.n_list) EXPECT_LE(std::abs(r.metric("functional n=" + std::to_string(n))), 1e-13);
  EXPECT_TRUE(r.check("lattice and Fourier forms agree").pass);
}

TEST(Experiments, EquipartitionShockIsNonzero) {
  ExperimentConfig c = default_config("equipartition");
  c.n_list = {8, 16};
  c.t_end = 0.002;
  const Report r = exp_equipartition(c);
  EXPECT_GT(std::abs(r.metric("functional n=8")), 1e-6);
  EXPECT_TRUE(r.check("lattice and Fourier forms agree").pass);
}

TEST(Experiments, AssumptionsLocalGibbsBounded) {
  ModelParams p;
  p.t_minus = 1.0;
  p.t_plus = 2.0;
  p.tau_plus = 0.0;
  const auto init = [&](int n) {
    ModelParams q = p;
    q.n = n;
    return moments_from_gibbs(GibbsSpec::local_gibbs(q), q);
  };
  const Report r = assumptions_check(init, p, {16, 32, 64, 128});
  EXPECT_TRUE(r.pass());
}

TEST(Experiments, AssumptionsDeterministicDataHasZeroCovariance) {
  ModelParams p;
  const auto init = [](int n) {
    Eigen::VectorXd m(phase_dim(n));
    for (int i = 0; i < m.size(); ++i) m[i] = std::sin(0.3 * i);
    return moments_from_means(m);
  };
  const Report r = assumptions_check(init, p, {8, 16, 32});
  EXPECT_EQ(r.metric("pp covariance sum max"), 0.0);
  EXPECT_EQ(r.metric("rr covariance sum max"), 0.0);
  EXPECT_EQ(r.metric("pr covariance sum max"), 0.0);
}

TEST(Experiments, AssumptionsFlagGrowingWhiteSpectrum) {
  ModelParams p;
  const auto init = [](int n) { return moments_from_means(Eigen::VectorXd::Zero(phase_dim(n))); };
  const auto white = [](int n) {
    std::mt19937_64 rng(n);
    std::normal_distribution<double> nd;
    InitialSpectra s = InitialSpectra::zero(n);
    for (auto& v : s.r_hat) v = std::sqrt(double(n)) * cplx(nd(rng), nd(rng));
    for (auto& v : s.p_hat) v = std::sqrt(double(n)) * cplx(nd(rng), nd(rng));
    return s;
  };
  const Report r = assumptions_check(init, p, {16, 64, 256}, white);
  EXPECT_FALSE(r.check("sup |r^| bounded").pass);
  EXPECT_FALSE(r.check("sup |p^| bounded").pass);
  EXPECT_TRUE(r.check("energy per site bounded").pass);
}

TEST(Experiments, MonteCarloSmallAndReproducible) {
  ExperimentConfig c = default_config("mc_vs_oracle");
  c.params.n = 4;
  c.trajectories = 400;
  c.t_end = 0.02;
  c.integrator.record_stride = 8;
  c.integrator.t_end_macro = c.t_end;
  const Report a = exp_mc_vs_oracle(c);
  const Report b = exp_mc_vs_oracle(c);
  EXPECT_GE(a.metric("fraction within 2"), 0.9);
  EXPECT_LE(a.metric("max |z|"), 5.0);
  ASSERT_EQ(a.tables[0].rows.size(), b.tables[0].rows.size());
  for (std::size_t i = 0; i < a.tables[0].rows.size(); ++i) EXPECT_EQ(a.tables[0].rows[i], b.tables[0].rows[i]);
  c.master_seed = 7;
  const Report d = exp_mc_vs_oracle(c);
  EXPECT_NE(d.tables[0].rows.back()[3], a.tables[0].rows.back()[3]);
  EXPECT_GE(d.metric("fraction within 2"), 0.9);
}

TEST(Experiments, DispatchByName) {
  EXPECT_EQ(experiment_names().size(), 10u);
  EXPECT_THROW(run_experiment("nope", ExperimentConfig{}), std::invalid_argument);
  ExperimentConfig c = default_config("generator_identities");
  c.trajectories = 5;
  EXPECT_TRUE(run_experiment("generator_identities", c).pass());
}

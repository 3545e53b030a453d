#include "flipchain/integrator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flipchain {

void IntegratorConfig::validate() const {
  if (!(dtau > 0) || dtau > 0.25) throw std::invalid_argument("dtau must lie in (0, 0.25]");
  if (!(t_end_macro >= 0) || !std::isfinite(t_end_macro)) throw std::invalid_argument("t_end_macro must be >= 0");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
}

long long IntegratorConfig::steps(int n) const {
  return std::llround(t_end_macro * static_cast<double>(n) * n / dtau);
}

double flip_probability(double gamma, double dtau) {
  if (!(gamma > 0) || !(dtau > 0)) throw std::invalid_argument("flip_probability: inputs must be positive");
  return -0.5 * std::expm1(-2.0 * gamma * dtau);
}

namespace {

void ou_half(ChainState& s, const IntegratorConfig& cfg, const ModelParams& params, std::mt19937_64& rng) {
  if (params.gamma_tilde <= 0) return;
  std::normal_distribution<double> nd(0.0, 1.0);
  const double a = std::exp(-0.5 * params.gamma_tilde * cfg.dtau);
  const double one_minus_a2 = -std::expm1(-params.gamma_tilde * cfg.dtau);
  const int n = s.n();
  for (int x : {0, n}) s.p[x] = a * s.p[x] + std::sqrt(params.boundary_temperature(x) * one_minus_a2) * nd(rng);
}

void kick(ChainState& s, double h, double tau) {
  const int n = s.n();
  s.p[0] += h * s.r[0];
  for (int x = 1; x < n; ++x) s.p[x] += h * (s.r[x] - s.r[x - 1]);
  s.p[n] += h * (tau - s.r[n - 1]);
}

void drift(ChainState& s, double h) {
  const int n = s.n();
  for (int x = 1; x <= n; ++x) s.r[x - 1] += h * (s.p[x] - s.p[x - 1]);
}

void check_finite(const ChainState& s, const IntegratorConfig& cfg) {
  auto finite = [](const std::vector<double>& v) {
    for (double a : v)
      if (!std::isfinite(a)) return false;
    return true;
  };
  if (finite(s.p) && finite(s.r)) return;
  std::ostringstream os;
  os << "non-finite state at t_macro=" << s.t_macro << " (dtau=" << cfg.dtau << ", n=" << s.n() << ")";
  throw std::runtime_error(os.str());
}

// Neumaier compensated accumulator.
struct CompSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

BoundaryIntegrals integrands(const ChainState& s, const ModelParams& params) {
  const int n = s.n();
  BoundaryIntegrals f{};
  f[kIntP0] = s.p[0];
  f[kIntPn] = s.p[n];
  f[kIntR1] = s.r[0];
  f[kIntRnMinusTau] = s.r[n - 1] - params.tau_plus;
  f[kIntP0SqMinusT] = s.p[0] * s.p[0] - params.t_minus;
  f[kIntPnSqMinusT] = s.p[n] * s.p[n] - params.t_plus;
  f[kIntJ01] = -s.p[0] * s.r[0];
  f[kIntJnm1n] = -s.p[n - 1] * s.r[n - 1];
  f[kIntP0P1] = s.p[0] * s.p[1];
  f[kIntPnm1Pn] = s.p[n - 1] * s.p[n];
  return f;
}

}  // namespace

void step_inplace(ChainState& s, const IntegratorConfig& cfg, const ModelParams& params, std::mt19937_64& rng) {
  const int n = s.n();
  ou_half(s, cfg, params, rng);
  if (cfg.hamiltonian) {
    kick(s, 0.5 * cfg.dtau, params.tau_plus);
    drift(s, cfg.dtau);
    kick(s, 0.5 * cfg.dtau, params.tau_plus);
  }
  if (params.gamma > 0) {
    std::bernoulli_distribution flip(flip_probability(params.gamma, cfg.dtau));
    for (int x = 0; x <= n; ++x)
      if (flip(rng)) s.p[x] = -s.p[x];
  }
  ou_half(s, cfg, params, rng);
  s.t_macro += cfg.dtau / (static_cast<double>(n) * n);
  check_finite(s, cfg);
}

ChainState step(const ChainState& s, const IntegratorConfig& cfg, const ModelParams& params, std::mt19937_64& rng) {
  ChainState out(s);
  step_inplace(out, cfg, params, rng);
  return out;
}

const std::array<std::string, kNumBoundaryStats>& boundary_stat_names() {
  static const std::array<std::string, kNumBoundaryStats> names = {
      "int_p0",       "int_pn",       "int_r1",  "int_rn_minus_tau", "int_p0sq_minus_tminus",
      "int_pnsq_minus_tplus", "int_j01", "int_jnm1n", "int_p0p1",       "int_pnm1pn"};
  return names;
}

std::vector<double> record_times(const IntegratorConfig& cfg, int n, double t0) {
  const long long steps = cfg.steps(n);
  const double ds = cfg.dtau / (static_cast<double>(n) * n);
  std::vector<double> t{t0};
  for (long long k = 1; k <= steps; ++k)
    if (k % cfg.record_stride == 0 || k == steps) t.push_back(t0 + static_cast<double>(k) * ds);
  return t;
}

Trajectory run_trajectory(const ChainState& initial, const IntegratorConfig& cfg, const ModelParams& params,
                          std::mt19937_64& rng) {
  cfg.validate();
  if (!initial.valid() || initial.n() != params.n) throw std::invalid_argument("run_trajectory: invalid initial state");
  const int n = params.n;
  const long long steps = cfg.steps(n);
  const double ds = cfg.dtau / (static_cast<double>(n) * n);

  Trajectory tr;
  ChainState s(initial);
  const double t0 = s.t_macro;
  tr.times.push_back(s.t_macro);
  tr.states.push_back(s);

  std::array<CompSum, kNumBoundaryStats> acc;
  BoundaryIntegrals prev = integrands(s, params);
  for (long long k = 1; k <= steps; ++k) {
    step_inplace(s, cfg, params, rng);
    // Absolute clock avoids drift from repeated addition.
    s.t_macro = t0 + static_cast<double>(k) * ds;
    const BoundaryIntegrals cur = integrands(s, params);
    for (int i = 0; i < kNumBoundaryStats; ++i) acc[i].add(0.5 * ds * (prev[i] + cur[i]));
    prev = cur;
    if (k % cfg.record_stride == 0 || k == steps) {
      tr.times.push_back(s.t_macro);
      tr.states.push_back(s);
    }
  }
  for (int i = 0; i < kNumBoundaryStats; ++i) tr.integrals[i] = acc[i].value();
  return tr;
}

}  // namespace flipchain

#include "flipchain/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace flipchain {

void ModelParams::validate() const {
  if (n < 2) throw std::invalid_argument("n must be >= 2, got " + std::to_string(n));
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  if (!(gamma_tilde > 0)) throw std::invalid_argument("gamma_tilde must be positive");
  if (!(t_minus > 0) || !(t_plus > 0)) throw std::invalid_argument("temperatures must be positive");
  if (!std::isfinite(tau_plus)) throw std::invalid_argument("tau_plus must be finite");
}

double ModelParams::boundary_temperature(int x) const {
  if (x == 0) return t_minus;
  if (x == n) return t_plus;
  return 0.0;
}

std::vector<double> ChainState::phase() const {
  std::vector<double> z(r);
  z.insert(z.end(), p.begin(), p.end());
  return z;
}

ChainState ChainState::from_phase(const std::vector<double>& z, double t_macro) {
  if (z.size() < 5 || z.size() % 2 == 0) throw std::invalid_argument("phase vector must have odd length 2n+1");
  const int n = static_cast<int>(z.size() - 1) / 2;
  ChainState s(n);
  std::copy(z.begin(), z.begin() + n, s.r.begin());
  std::copy(z.begin() + n, z.end(), s.p.begin());
  s.t_macro = t_macro;
  return s;
}

bool ChainState::valid() const {
  if (p.size() != r.size() + 1 || r.empty()) return false;
  for (double v : r)
    if (!std::isfinite(v)) return false;
  for (double v : p)
    if (!std::isfinite(v)) return false;
  return std::isfinite(t_macro) && t_macro >= 0;
}

GibbsSpec GibbsSpec::local_gibbs(const ModelParams& params) {
  GibbsSpec g;
  const double bm = 1.0 / params.t_minus, bp = 1.0 / params.t_plus;
  g.beta_profile = [bm, bp](double u) { return (bp - bm) * u + bm; };
  g.tension = params.tau_plus;
  return g;
}

GibbsSpec GibbsSpec::equilibrium(double temperature, double tension) {
  GibbsSpec g;
  const double b = 1.0 / temperature;
  g.beta_profile = [b](double) { return b; };
  g.tension = tension;
  return g;
}

double GibbsSpec::beta(double u) const { return beta_profile ? beta_profile(u) : 1.0; }
double GibbsSpec::r_mean(double u) const { return tension + (mean_r ? mean_r(u) : 0.0); }
double GibbsSpec::p_mean(double u) const { return mean_p ? mean_p(u) : 0.0; }
double GibbsSpec::r_var(double u) const { return (var_scale_r ? var_scale_r(u) : 1.0) / beta(u); }
double GibbsSpec::p_var(double u) const { return (var_scale_p ? var_scale_p(u) : 1.0) / beta(u); }

void GibbsSpec::validate() const {
  for (int i = 0; i <= 64; ++i) {
    const double b = beta(i / 64.0);
    if (!(b > 0) || !std::isfinite(b)) throw std::invalid_argument("beta_profile must be positive on [0,1]");
  }
}

std::vector<double> energy_density(const ChainState& s) {
  const int n = s.n();
  std::vector<double> e(n + 1);
  for (int x = 0; x <= n; ++x) e[x] = 0.5 * s.p[x] * s.p[x] + 0.5 * s.rx(x) * s.rx(x);
  return e;
}

double current(const ChainState& s, int x) {
  if (x < 0 || x >= s.n()) throw std::out_of_range("current: site out of range");
  return -s.p[x] * s.rx(x + 1);
}

double gibbs_potential(double beta, double tau) {
  if (!(beta > 0)) throw std::invalid_argument("gibbs_potential: beta must be positive");
  return beta * tau * tau / 2.0 + 0.5 * std::log(2.0 * std::numbers::pi / beta);
}

ChainState sample_initial(const GibbsSpec& spec, const ModelParams& params, std::mt19937_64& rng) {
  spec.validate();
  const int n = params.n;
  std::normal_distribution<double> nd(0.0, 1.0);
  ChainState s(n);
  for (int x = 1; x <= n; ++x) {
    const double u = static_cast<double>(x) / n;
    s.r[x - 1] = spec.r_mean(u) + std::sqrt(spec.r_var(u)) * nd(rng);
  }
  for (int x = 0; x <= n; ++x) {
    const double u = static_cast<double>(x) / n;
    s.p[x] = spec.p_mean(u) + std::sqrt(spec.p_var(u)) * nd(rng);
  }
  return s;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1342543de82ef95ULL + 1));
}

}  // namespace flipchain

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace flipchain {

// Physical constants of the open chain. Sites run over 0..n.
struct ModelParams {
  int n = 16;
  double gamma = 1.0;        // flip intensity
  double gamma_tilde = 1.0;  // thermostat intensity
  double t_minus = 1.0;
  double t_plus = 1.0;
  double tau_plus = 0.0;     // tension at the right end

  // Throws std::invalid_argument on violated invariants.
  void validate() const;

  // Thermostat temperature at a boundary site (x = 0 or x = n), 0 elsewhere.
  double boundary_temperature(int x) const;
};

// Phase vector layout: z = (r_1..r_n, p_0..p_n), length 2n+1.
inline int phase_dim(int n) { return 2 * n + 1; }
inline int r_index(int n, int x) { (void)n; return x - 1; }
inline int p_index(int n, int x) { return n + x; }

struct ChainState {
  std::vector<double> r;  // r[x-1] holds r_x, x = 1..n
  std::vector<double> p;  // p[x] holds p_x, x = 0..n
  double t_macro = 0.0;

  ChainState() = default;
  explicit ChainState(int n) : r(n, 0.0), p(n + 1, 0.0) {}

  int n() const { return static_cast<int>(r.size()); }
  // r_x with the convention r_0 = 0.
  double rx(int x) const { return x == 0 ? 0.0 : r[x - 1]; }

  std::vector<double> phase() const;
  static ChainState from_phase(const std::vector<double>& z, double t_macro = 0.0);

  // Lengths and finiteness.
  bool valid() const;
};

// Local Gibbs initial law.
struct GibbsSpec {
  std::function<double(double)> beta_profile;
  double tension = 0.0;
  std::function<double(double)> mean_r;  // optional, added to tension
  std::function<double(double)> mean_p;  // optional
  // Optional multiplicative factors on the variances 1/beta, used to build
  // out-of-equilibrium starts where kinetic and potential parts differ.
  std::function<double(double)> var_scale_r;
  std::function<double(double)> var_scale_p;

  // Linear inverse temperature between 1/T- and 1/T+, tension tau_plus.
  static GibbsSpec local_gibbs(const ModelParams& params);
  // Homogeneous equilibrium at temperature T.
  static GibbsSpec equilibrium(double temperature, double tension = 0.0);

  double beta(double u) const;
  double r_mean(double u) const;
  double p_mean(double u) const;
  double r_var(double u) const;
  double p_var(double u) const;
  void validate() const;
};

// Energy density p_x^2/2 + r_x^2/2, x = 0..n.
std::vector<double> energy_density(const ChainState& s);

// Current j_{x,x+1} = -p_x r_{x+1}, 0 <= x <= n-1.
double current(const ChainState& s, int x);

double gibbs_potential(double beta, double tau);

// Site u = x/n for the profile functions.
ChainState sample_initial(const GibbsSpec& spec, const ModelParams& params, std::mt19937_64& rng);

// Deterministic per-trajectory seed from (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace flipchain

#pragma once

#include <initializer_list>
#include <map>
#include <utility>

#include "flipchain/model.hpp"

namespace flipchain {

// A phase variable reference. The sentinel index -1 stands for r_0, which is
// identically zero, so any term containing it vanishes.
struct Var {
  int index = -1;
  bool is_zero() const { return index < 0; }
};

// Polynomial of degree <= 2 in the 2n+1 phase variables.
// Quadratic terms are stored once per unordered pair (i <= j) as the
// coefficient of z_i z_j.
class QuadraticObservable {
 public:
  explicit QuadraticObservable(int n);

  int n() const { return n_; }
  Var r(int x) const;
  Var p(int x) const;

  QuadraticObservable& add_constant(double c);
  QuadraticObservable& add(double c, Var a);
  QuadraticObservable& add(double c, Var a, Var b);
  // Generic monomial entry point; more than two factors is rejected.
  QuadraticObservable& add_monomial(double c, std::initializer_list<Var> vars);
  QuadraticObservable& add_scaled(const QuadraticObservable& other, double s);

  double evaluate(const ChainState& s) const;

  double constant() const { return c0_; }
  const std::map<int, double>& linear() const { return lin_; }
  const std::map<std::pair<int, int>, double>& quadratic() const { return quad_; }
  // Symmetric matrix entry Q_ij with obs = c + l.z + z^T Q z.
  double quad_entry(int i, int j) const;

 private:
  int n_;
  double c0_ = 0.0;
  std::map<int, double> lin_;
  std::map<std::pair<int, int>, double> quad_;
};

// (L obs)(state) for L = n^2 (A + gamma S + gamma_tilde S~).
// Does not call params.validate(): gamma = 0 or gamma_tilde = 0 are allowed.
double generator_apply(const QuadraticObservable& obs, const ChainState& s, const ModelParams& params);

// Local functions used by the identities below.
QuadraticObservable energy_observable(int n, int x);
QuadraticObservable current_observable(int n, int x);
QuadraticObservable g_observable(int n, int x, double gamma);
QuadraticObservable V_observable(int n, int x, double gamma);
QuadraticObservable h_observable(int n, int x, double gamma);
QuadraticObservable W_observable(int n, int x, double gamma);

// n^-2 L g_x - (V_{x+1} - V_x) - j_{x,x+1}, x in 1..n-1.
double fd_residual_g(const ChainState& s, int x, const ModelParams& params);
// n^-2 L h_x - (W_{x+1} - W_x) + 2 p_x p_{x-1}, x in 2..n-2.
double fd_residual_h(const ChainState& s, int x, const ModelParams& params);

}  // namespace flipchain

#include "flipchain/observable.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace flipchain {

QuadraticObservable::QuadraticObservable(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("QuadraticObservable: n must be >= 2");
}

Var QuadraticObservable::r(int x) const {
  if (x < 0 || x > n_) throw std::out_of_range("r index " + std::to_string(x));
  return Var{x == 0 ? -1 : r_index(n_, x)};
}

Var QuadraticObservable::p(int x) const {
  if (x < 0 || x > n_) throw std::out_of_range("p index " + std::to_string(x));
  return Var{p_index(n_, x)};
}

QuadraticObservable& QuadraticObservable::add_constant(double c) {
  c0_ += c;
  return *this;
}

QuadraticObservable& QuadraticObservable::add(double c, Var a) {
  if (!a.is_zero()) lin_[a.index] += c;
  return *this;
}

QuadraticObservable& QuadraticObservable::add(double c, Var a, Var b) {
  if (a.is_zero() || b.is_zero()) return *this;
  int i = a.index, j = b.index;
  if (i > j) std::swap(i, j);
  quad_[{i, j}] += c;
  return *this;
}

QuadraticObservable& QuadraticObservable::add_monomial(double c, std::initializer_list<Var> vars) {
  const std::vector<Var> v(vars);
  switch (v.size()) {
    case 0: return add_constant(c);
    case 1: return add(c, v[0]);
    case 2: return add(c, v[0], v[1]);
    default: throw std::invalid_argument("QuadraticObservable: degree > 2 not supported");
  }
}

QuadraticObservable& QuadraticObservable::add_scaled(const QuadraticObservable& o, double s) {
  if (o.n_ != n_) throw std::invalid_argument("QuadraticObservable: size mismatch");
  c0_ += s * o.c0_;
  for (auto [i, c] : o.lin_) lin_[i] += s * c;
  for (auto [ij, c] : o.quad_) quad_[ij] += s * c;
  return *this;
}

double QuadraticObservable::quad_entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = quad_.find({i, j});
  if (it == quad_.end()) return 0.0;
  return i == j ? it->second : 0.5 * it->second;
}

double QuadraticObservable::evaluate(const ChainState& s) const {
  const std::vector<double> z = s.phase();
  double v = c0_;
  for (auto [i, c] : lin_) v += c * z[i];
  for (auto [ij, c] : quad_) v += c * z[ij.first] * z[ij.second];
  return v;
}

double generator_apply(const QuadraticObservable& obs, const ChainState& s, const ModelParams& params) {
  const int n = obs.n();
  if (s.n() != n) throw std::invalid_argument("generator_apply: state size mismatch");
  const std::vector<double> z = s.phase();
  const int d = phase_dim(n);
  auto is_p = [n](int i) { return i >= n; };

  // Gradient of obs at z.
  std::vector<double> grad(d, 0.0);
  for (auto [i, c] : obs.linear()) grad[i] += c;
  for (auto [ij, c] : obs.quadratic()) {
    const auto [i, j] = ij;
    if (i == j) {
      grad[i] += 2.0 * c * z[i];
    } else {
      grad[i] += c * z[j];
      grad[j] += c * z[i];
    }
  }

  // Deterministic vector field: Hamiltonian part, boundary tension, OU drift.
  std::vector<double> v(d, 0.0);
  for (int x = 1; x <= n; ++x) v[r_index(n, x)] = s.p[x] - s.p[x - 1];
  for (int x = 1; x < n; ++x) v[p_index(n, x)] = s.rx(x + 1) - s.rx(x);
  v[p_index(n, 0)] = s.rx(1) - params.gamma_tilde * s.p[0];
  v[p_index(n, n)] = params.tau_plus - s.rx(n) - params.gamma_tilde * s.p[n];

  double drift = 0.0;
  for (int i = 0; i < d; ++i) drift += grad[i] * v[i];

  // Flips: sum_x obs(p^x) - obs(p).
  double flip = 0.0;
  for (auto [i, c] : obs.linear())
    if (is_p(i)) flip += -2.0 * c * z[i];
  for (auto [ij, c] : obs.quadratic()) {
    const auto [i, j] = ij;
    if (i == j) continue;
    const int np = static_cast<int>(is_p(i)) + static_cast<int>(is_p(j));
    flip += -2.0 * np * c * z[i] * z[j];
  }

  // Thermostat diffusion.
  double diff = 0.0;
  for (int x : {0, n}) {
    const int i = p_index(n, x);
    auto it = obs.quadratic().find({i, i});
    if (it != obs.quadratic().end()) diff += params.boundary_temperature(x) * 2.0 * it->second;
  }

  const double n2 = static_cast<double>(n) * n;
  return n2 * (drift + params.gamma * flip + params.gamma_tilde * diff);
}

QuadraticObservable energy_observable(int n, int x) {
  QuadraticObservable o(n);
  o.add(0.5, o.p(x), o.p(x));
  o.add(0.5, o.r(x), o.r(x));
  return o;
}

QuadraticObservable current_observable(int n, int x) {
  QuadraticObservable o(n);
  o.add(-1.0, o.p(x), o.r(x + 1));
  return o;
}

QuadraticObservable g_observable(int n, int x, double gamma) {
  QuadraticObservable o(n);
  o.add(-0.25, o.p(x), o.p(x));
  o.add(0.25 / gamma, o.p(x), o.r(x));
  o.add(0.25 / gamma, o.p(x), o.r(x + 1));
  return o;
}

QuadraticObservable V_observable(int n, int x, double gamma) {
  QuadraticObservable o(n);
  o.add(0.25 / gamma, o.r(x), o.r(x));
  o.add(0.25 / gamma, o.p(x), o.p(x - 1));
  return o;
}

QuadraticObservable h_observable(int n, int x, double gamma) {
  // (1/2 (r_x + r_{x-1})^2 + p_{x-1} p_x - r_x^2) / (2 gamma)
  QuadraticObservable o(n);
  const double k = 0.5 / gamma;
  o.add(0.5 * k, o.r(x), o.r(x));
  o.add(0.5 * k, o.r(x - 1), o.r(x - 1));
  o.add(k, o.r(x), o.r(x - 1));
  o.add(k, o.p(x - 1), o.p(x));
  o.add(-k, o.r(x), o.r(x));
  return o;
}

QuadraticObservable W_observable(int n, int x, double gamma) {
  QuadraticObservable o(n);
  const double k = 0.5 / gamma;
  o.add(k, o.p(x - 2), o.r(x - 1));
  o.add(k, o.p(x - 2), o.r(x));
  return o;
}

double fd_residual_g(const ChainState& s, int x, const ModelParams& params) {
  const int n = s.n();
  if (x < 1 || x > n - 1) throw std::out_of_range("fd_residual_g: x must be in 1..n-1");
  const double n2 = static_cast<double>(n) * n;
  const double lg = generator_apply(g_observable(n, x, params.gamma), s, params) / n2;
  const double dv = V_observable(n, x + 1, params.gamma).evaluate(s) - V_observable(n, x, params.gamma).evaluate(s);
  return lg - dv - current(s, x);
}

double fd_residual_h(const ChainState& s, int x, const ModelParams& params) {
  const int n = s.n();
  if (x < 2 || x > n - 2) throw std::out_of_range("fd_residual_h: x must be in 2..n-2");
  const double n2 = static_cast<double>(n) * n;
  const double lh = generator_apply(h_observable(n, x, params.gamma), s, params) / n2;
  const double dw = W_observable(n, x + 1, params.gamma).evaluate(s) - W_observable(n, x, params.gamma).evaluate(s);
  // The flip part of L acting on p_{x-1} p_x contributes -4 gamma p_{x-1} p_x,
  // hence the factor 2 on the remainder.
  return lh - dw + 2.0 * s.p[x] * s.p[x - 1];
}

}  // namespace flipchain

#include "flipchain/wigner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "flipchain/fourier.hpp"

namespace flipchain {

namespace {
int wrap(int a, int N) { return ((a % N) + N) % N; }
}  // namespace

std::size_t WignerSet::idx(int eta, int j) const {
  const int NN = N();
  return static_cast<std::size_t>(wrap(eta, NN)) * NN + wrap(j, NN);
}

WignerSet wigner_from_cov(const Eigen::MatrixXd& C, int n, double t_macro) {
  const int d = phase_dim(n), N = n + 1;
  if (C.rows() != d || C.cols() != d) throw std::invalid_argument("wigner_from_cov: covariance shape mismatch");
  using cd = std::complex<double>;
  cvec c(static_cast<std::size_t>(N) * N), dk(c.size());
  for (int x = 0; x <= n; ++x)
    for (int y = 0; y <= n; ++y) {
      const double rr = (x > 0 && y > 0) ? C(r_index(n, x), r_index(n, y)) : 0.0;
      const double pp = C(p_index(n, x), p_index(n, y));
      const double pr = y > 0 ? C(p_index(n, x), r_index(n, y)) : 0.0;
      const double rp = x > 0 ? C(r_index(n, x), p_index(n, y)) : 0.0;
      c[x * N + y] = cd(rr + pp, pr - rp);
      dk[x * N + y] = cd(rr - pp, rp + pr);
    }
  const cvec c2 = dft2_forward(c, N), d2 = dft2_forward(dk, N);

  WignerSet ws;
  ws.n = n;
  ws.t_macro = t_macro;
  const std::size_t total = static_cast<std::size_t>(N) * N;
  ws.Wplus.resize(total);
  ws.Yplus.resize(total);
  ws.Wminus.resize(total);
  ws.Yminus.resize(total);
  const double s = 1.0 / (2.0 * N);
  for (int eta = 0; eta < N; ++eta)
    for (int j = 0; j < N; ++j) {
      const std::size_t src = static_cast<std::size_t>(wrap(j + eta, N)) * N + wrap(-j, N);
      ws.Wplus[ws.idx(eta, j)] = s * c2[src];
      ws.Yplus[ws.idx(eta, j)] = s * d2[src];
    }
  for (int eta = 0; eta < N; ++eta)
    for (int j = 0; j < N; ++j) {
      ws.Wminus[ws.idx(eta, j)] = std::conj(ws.Wplus[ws.idx(-eta, -j)]);
      ws.Yminus[ws.idx(eta, j)] = std::conj(ws.Yplus[ws.idx(-eta, -j)]);
    }
  return ws;
}

double energy_functional(const WignerSet& ws) {
  double s = 0.0;
  for (std::size_t i = 0; i < ws.Wplus.size(); ++i)
    s += std::norm(ws.Wplus[i]) + std::norm(ws.Wminus[i]) + std::norm(ws.Yplus[i]) + std::norm(ws.Yminus[i]);
  return s / ws.N();
}

double dissipation_sum(const WignerSet& ws) {
  double s = 0.0;
  for (std::size_t i = 0; i < ws.Wplus.size(); ++i)
    s += std::norm(ws.Wplus[i] - ws.Wminus[i]) + std::norm(ws.Yplus[i] - ws.Yminus[i]);
  return s / ws.N();
}

std::vector<std::complex<double>> TestFunction2D::coefficients(double s, int n) const {
  const int N = n + 1;
  cvec g(N);
  for (int x = 0; x <= n; ++x) g[x] = G(s, static_cast<double>(x) / n);
  cvec gh = dft_forward(g);
  for (auto& v : gh) v /= static_cast<double>(N);
  return gh;
}

bool TestFunction2D::vanishes_at_boundary(double s) const {
  return std::abs(G(s, 0.0)) < 1e-12 && std::abs(G(s, 1.0)) < 1e-12;
}

EquipartitionResult equipartition_functional(const CovPath& path, const TestFunction2D& G, int n) {
  if (path.times.size() != path.cov.size()) throw std::invalid_argument("equipartition_functional: path size mismatch");
  EquipartitionResult res;
  const int N = n + 1;
  std::vector<double> lat(path.times.size()), fou(path.times.size());
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double s = path.times[i];
    if (!G.vanishes_at_boundary(s)) res.boundary_ok = false;
    const Eigen::MatrixXd& C = path.cov[i];
    double acc = 0.0;
    for (int x = 0; x <= n; ++x) {
      const double rr = x > 0 ? C(r_index(n, x), r_index(n, x)) : 0.0;
      acc += G.G(s, static_cast<double>(x) / n) * (rr - C(p_index(n, x), p_index(n, x)));
    }
    lat[i] = acc / N;

    const WignerSet ws = wigner_from_cov(C, n, s);
    const cvec gh = G.coefficients(s, n);
    std::complex<double> f = 0.0;
    for (int eta = 0; eta < N; ++eta) {
      std::complex<double> avg = 0.0;
      for (int j = 0; j < N; ++j) avg += ws.Yplus[ws.idx(eta, j)] + ws.Yminus[ws.idx(eta, j)];
      f += avg / static_cast<double>(N) * std::conj(gh[eta]);
    }
    fou[i] = f.real();
  }
  if (path.times.size() == 1) {
    res.lattice = 0.0;
    res.fourier = 0.0;
    return res;
  }
  for (std::size_t i = 1; i < path.times.size(); ++i) {
    const double dt = path.times[i] - path.times[i - 1];
    res.lattice += 0.5 * dt * (lat[i] + lat[i - 1]);
    res.fourier += 0.5 * dt * (fou[i] + fou[i - 1]);
  }
  return res;
}

BalanceTerms balance_terms(const MomentState& ms, const ModelParams& params) {
  const int n = ms.n(), d = phase_dim(n);
  const Eigen::MatrixXd C = fluctuation_cov(ms);
  const double n2 = static_cast<double>(n) * n;
  const double pref = n2 / (n + 1.0);
  BalanceTerms b;
  for (int x : {0, n}) {
    const int i = p_index(n, x);
    b.thermostat += 2.0 * params.gamma_tilde * pref * params.boundary_temperature(x) * C(i, i);
    b.boundary_dissipation -= 2.0 * params.gamma_tilde * pref * C.row(i).squaredNorm();
  }
  for (int x = 0; x <= n; ++x) {
    const int i = p_index(n, x);
    b.injection += 4.0 * params.gamma * pref * ms.m[i] * ms.m[i] * C(i, i);
  }
  double pp = 0.0, pr = 0.0;
  for (int i = n; i < d; ++i) {
    for (int j = n; j < d; ++j)
      if (i != j) pp += C(i, j) * C(i, j);
    for (int j = 0; j < n; ++j) pr += C(i, j) * C(i, j);
  }
  b.bulk_dissipation = -4.0 * params.gamma * pref * (pp + pr);
  return b;
}

double wigner_balance_residual(const std::vector<MomentState>& path, const ModelParams& params, double dt) {
  if (path.size() < 3) throw std::invalid_argument("wigner_balance_residual: need at least 3 records");
  std::vector<double> E(path.size());
  for (std::size_t i = 0; i < path.size(); ++i)
    E[i] = energy_functional(wigner_from_cov(fluctuation_cov(path[i]), path[i].n(), path[i].t_macro));
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const double lhs = (E[i + 1] - E[i - 1]) / (4.0 * dt);
    sup = std::max(sup, std::abs(lhs - balance_terms(path[i], params).total()));
  }
  return sup;
}

}  // namespace flipchain

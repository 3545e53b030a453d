#include "flipchain/moments.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flipchain {

namespace {

// y = A0 x for one column; A0 includes the -gamma_tilde boundary damping.
inline void apply_A0(const double* x, double* y, int n, double gt) {
  for (int s = 1; s <= n; ++s) y[s - 1] = x[n + s] - x[n + s - 1];
  y[n] = x[0] - gt * x[n];
  for (int s = 1; s < n; ++s) y[n + s] = x[s] - x[s - 1];
  y[2 * n] = -x[n - 1] - gt * x[2 * n];
}

struct Rhs {
  int n, d;
  double gamma, gt, tau;
  Eigen::VectorXd q;
  Eigen::MatrixXd Y;  // scratch

  explicit Rhs(const ModelParams& p)
      : n(p.n), d(phase_dim(p.n)), gamma(p.gamma), gt(p.gamma_tilde), tau(p.tau_plus), q(Eigen::VectorXd::Zero(d)),
        Y(d, d) {
    q[p_index(n, 0)] = 2.0 * gt * p.t_minus;
    q[p_index(n, n)] += 2.0 * gt * p.t_plus;
  }

  void mean(const Eigen::VectorXd& m, Eigen::VectorXd& dm) const {
    apply_A0(m.data(), dm.data(), n, gt);
    for (int s = 0; s <= n; ++s) dm[n + s] -= 2.0 * gamma * m[n + s];
    dm[2 * n] += tau;
  }

  void second(const Eigen::MatrixXd& M, const Eigen::VectorXd& m, Eigen::MatrixXd& dM) {
    for (int j = 0; j < d; ++j) apply_A0(M.col(j).data(), Y.col(j).data(), n, gt);
    for (int j = 0; j < d; ++j) {
      const bool jp = j >= n;
      for (int i = 0; i < d; ++i) {
        const bool ip = i >= n;
        double f = 0.0;
        if (i != j) f = ip && jp ? -4.0 : (ip || jp ? -2.0 : 0.0);
        dM(i, j) = Y(i, j) + Y(j, i) + gamma * f * M(i, j);
      }
    }
    // b m^T + m b^T with b = tau e_{p_n}.
    if (tau != 0.0) {
      const int k = 2 * n;
      for (int i = 0; i < d; ++i) {
        dM(k, i) += tau * m[i];
        dM(i, k) += tau * m[i];
      }
    }
    dM.diagonal() += q;
  }
};

void symmetrize(Eigen::MatrixXd& M) {
  const Eigen::Index d = M.rows();
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j + 1; i < d; ++i) {
      const double v = 0.5 * (M(i, j) + M(j, i));
      M(i, j) = v;
      M(j, i) = v;
    }
}

int step_count(double span_micro, double dtau) {
  if (span_micro <= 0) return 0;
  return static_cast<int>(std::ceil(span_micro / dtau - 1e-9));
}

void check_blowup(double norm, double norm0, double h, double t) {
  if (!std::isfinite(norm) || norm > 1e10 * (1.0 + norm0)) {
    std::ostringstream os;
    os << "moment evolution unstable at t_macro=" << t << " with micro step " << h << "; reduce dtau";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

DriftSpec build_drift(const ModelParams& params) {
  const int n = params.n, d = phase_dim(n);
  DriftSpec ds;
  ds.n = n;
  std::vector<Eigen::Triplet<double>> t;
  for (int x = 1; x <= n; ++x) {
    t.emplace_back(r_index(n, x), p_index(n, x), 1.0);
    t.emplace_back(r_index(n, x), p_index(n, x - 1), -1.0);
  }
  t.emplace_back(p_index(n, 0), r_index(n, 1), 1.0);
  t.emplace_back(p_index(n, 0), p_index(n, 0), -params.gamma_tilde);
  for (int x = 1; x < n; ++x) {
    t.emplace_back(p_index(n, x), r_index(n, x + 1), 1.0);
    t.emplace_back(p_index(n, x), r_index(n, x), -1.0);
  }
  t.emplace_back(p_index(n, n), r_index(n, n), -1.0);
  t.emplace_back(p_index(n, n), p_index(n, n), -params.gamma_tilde);
  ds.A0.resize(d, d);
  ds.A0.setFromTriplets(t.begin(), t.end());
  ds.Df = Eigen::VectorXd::Zero(d);
  for (int x = 0; x <= n; ++x) ds.Df[p_index(n, x)] = -2.0 * params.gamma;
  ds.b = Eigen::VectorXd::Zero(d);
  ds.b[p_index(n, n)] = params.tau_plus;
  ds.q = Eigen::VectorXd::Zero(d);
  ds.q[p_index(n, 0)] = 2.0 * params.gamma_tilde * params.t_minus;
  ds.q[p_index(n, n)] += 2.0 * params.gamma_tilde * params.t_plus;
  return ds;
}

Eigen::MatrixXd flip_term(const Eigen::MatrixXd& M, double gamma) {
  const Eigen::Index d = M.rows();
  if (M.cols() != d || d % 2 == 0) throw std::invalid_argument("flip_term: shape must be (2n+1)^2");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("flip_term: matrix must be symmetric");
  const Eigen::Index n = (d - 1) / 2;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i == j) continue;
      const bool ip = i >= n, jp = j >= n;
      if (ip && jp)
        F(i, j) = -4.0 * gamma * M(i, j);
      else if (ip || jp)
        F(i, j) = -2.0 * gamma * M(i, j);
    }
  return F;
}

MomentState moments_from_gibbs(const GibbsSpec& spec, const ModelParams& params) {
  spec.validate();
  const int n = params.n, d = phase_dim(n);
  MomentState ms;
  ms.m = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd var(d);
  for (int x = 1; x <= n; ++x) {
    const double u = static_cast<double>(x) / n;
    ms.m[r_index(n, x)] = spec.r_mean(u);
    var[r_index(n, x)] = spec.r_var(u);
  }
  for (int x = 0; x <= n; ++x) {
    const double u = static_cast<double>(x) / n;
    ms.m[p_index(n, x)] = spec.p_mean(u);
    var[p_index(n, x)] = spec.p_var(u);
  }
  ms.M = ms.m * ms.m.transpose();
  ms.M.diagonal() += var;
  return ms;
}

MomentState moments_from_means(const Eigen::VectorXd& m, double t_macro) {
  MomentState ms;
  ms.m = m;
  ms.M = m * m.transpose();
  ms.t_macro = t_macro;
  return ms;
}

MomentState evolve_observed(const MomentState& ms, const ModelParams& params, double t_target, double dtau,
                            const MomentObserver& obs) {
  if (t_target < ms.t_macro) throw std::invalid_argument("evolve: t_target before current time");
  if (!(dtau > 0)) throw std::invalid_argument("evolve: dtau must be positive");
  const int n = params.n, d = phase_dim(n);
  if (ms.m.size() != d || ms.M.rows() != d || ms.M.cols() != d) throw std::invalid_argument("evolve: shape mismatch");
  const double n2 = static_cast<double>(n) * n;
  const int steps = step_count((t_target - ms.t_macro) * n2, dtau);
  MomentState cur = ms;
  if (obs) obs(cur);
  if (steps == 0) {
    cur.t_macro = t_target;
    return cur;
  }
  const double h = (t_target - ms.t_macro) * n2 / steps;
  Rhs rhs(params);
  Eigen::VectorXd k1(d), k2(d), k3(d), k4(d), mt(d);
  Eigen::MatrixXd K1(d, d), K2(d, d), K3(d, d), K4(d, d), Mt(d, d);
  const double norm0 = cur.M.norm();
  for (int s = 1; s <= steps; ++s) {
    rhs.mean(cur.m, k1);
    rhs.second(cur.M, cur.m, K1);
    mt = cur.m + 0.5 * h * k1;
    Mt = cur.M + 0.5 * h * K1;
    symmetrize(Mt);
    rhs.mean(mt, k2);
    rhs.second(Mt, mt, K2);
    mt = cur.m + 0.5 * h * k2;
    Mt = cur.M + 0.5 * h * K2;
    symmetrize(Mt);
    rhs.mean(mt, k3);
    rhs.second(Mt, mt, K3);
    mt = cur.m + h * k3;
    Mt = cur.M + h * K3;
    symmetrize(Mt);
    rhs.mean(mt, k4);
    rhs.second(Mt, mt, K4);
    cur.m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    cur.M += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    symmetrize(cur.M);
    cur.t_macro = ms.t_macro + (t_target - ms.t_macro) * s / steps;
    if (s % 64 == 0 || s == steps) check_blowup(cur.M.norm(), norm0, h, cur.t_macro);
    if (obs) obs(cur);
  }
  cur.t_macro = t_target;
  return cur;
}

MomentState evolve(const MomentState& ms, const ModelParams& params, double t_target, double dtau) {
  return evolve_observed(ms, params, t_target, dtau, {});
}

Eigen::VectorXd evolve_means(const Eigen::VectorXd& m0, const ModelParams& params, double t0, double t_target,
                             double dtau, const MeanObserver& obs) {
  if (t_target < t0) throw std::invalid_argument("evolve_means: t_target before t0");
  const int n = params.n, d = phase_dim(n);
  if (m0.size() != d) throw std::invalid_argument("evolve_means: shape mismatch");
  const double n2 = static_cast<double>(n) * n;
  const int steps = step_count((t_target - t0) * n2, dtau);
  Eigen::VectorXd m = m0;
  if (obs) obs(t0, m);
  if (steps == 0) return m;
  const double h = (t_target - t0) * n2 / steps;
  Rhs rhs(params);
  Eigen::VectorXd k1(d), k2(d), k3(d), k4(d), mt(d);
  const double norm0 = m.norm();
  for (int s = 1; s <= steps; ++s) {
    rhs.mean(m, k1);
    mt = m + 0.5 * h * k1;
    rhs.mean(mt, k2);
    mt = m + 0.5 * h * k2;
    rhs.mean(mt, k3);
    mt = m + h * k3;
    rhs.mean(mt, k4);
    m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = t0 + (t_target - t0) * s / steps;
    if (s % 256 == 0 || s == steps) check_blowup(m.norm(), norm0 + std::abs(params.tau_plus) * n, h, t);
    if (obs) obs(t, m);
  }
  return m;
}

Eigen::VectorXd stationary_mean(const ModelParams& params) {
  params.validate();
  const DriftSpec ds = build_drift(params);
  Eigen::MatrixXd K = Eigen::MatrixXd(ds.A0);
  K.diagonal() += ds.Df;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd m = lu.solve(-ds.b);
  if (!m.allFinite()) throw std::runtime_error("stationary_mean: singular drift");
  return m;
}

std::vector<double> energy_profile(const MomentState& ms) {
  const int n = ms.n();
  std::vector<double> e(n + 1);
  for (int x = 0; x <= n; ++x) {
    const double pp = ms.M(p_index(n, x), p_index(n, x));
    const double rr = x == 0 ? 0.0 : ms.M(r_index(n, x), r_index(n, x));
    e[x] = 0.5 * (pp + rr);
  }
  return e;
}

Eigen::MatrixXd fluctuation_cov(const MomentState& ms) { return ms.M - ms.m * ms.m.transpose(); }

void write_moments_csv(const std::vector<MomentState>& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file);
  out.precision(12);
  out << "t,x,mean_r,mean_p,var_r,var_p,energy\n";
  for (const auto& ms : path) {
    const int n = ms.n();
    const Eigen::MatrixXd C = fluctuation_cov(ms);
    const std::vector<double> e = energy_profile(ms);
    for (int x = 0; x <= n; ++x) {
      const double mr = x == 0 ? 0.0 : ms.m[r_index(n, x)];
      const double vr = x == 0 ? 0.0 : C(r_index(n, x), r_index(n, x));
      out << ms.t_macro << ',' << x << ',' << mr << ',' << ms.m[p_index(n, x)] << ',' << vr << ','
          << C(p_index(n, x), p_index(n, x)) << ',' << e[x] << '\n';
    }
  }
}

void save_checkpoint(const MomentState& ms, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file);
  const std::int64_t n = ms.n();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&ms.t_macro), sizeof ms.t_macro);
  const Eigen::Index d = ms.m.size();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = ms.M(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  out.write(reinterpret_cast<const char*>(ms.m.data()), static_cast<std::streamsize>(d * sizeof(double)));
}

MomentState load_checkpoint(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::int64_t n = 0;
  MomentState ms;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&ms.t_macro), sizeof ms.t_macro);
  if (!in || n < 2 || n > 4096) throw std::runtime_error("corrupt checkpoint header in " + file);
  const Eigen::Index d = 2 * n + 1;
  ms.M.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) in.read(reinterpret_cast<char*>(&ms.M(i, j)), sizeof(double));
  ms.m.resize(d);
  in.read(reinterpret_cast<char*>(ms.m.data()), static_cast<std::streamsize>(d * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint " + file);
  return ms;
}

}  // namespace flipchain

#include "flipchain/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace flipchain {

namespace {

constexpr int kBlock = 64;

// Raw sums over a set of trajectories.
struct Acc {
  long long count = 0;
  std::vector<Eigen::VectorXd> z1, z2, e1, e2;
  std::vector<Eigen::MatrixXd> m1, m2;
  Eigen::VectorXd b1, b2;

  void add(const Acc& o) {
    count += o.count;
    for (std::size_t i = 0; i < z1.size(); ++i) {
      z1[i] += o.z1[i];
      z2[i] += o.z2[i];
      e1[i] += o.e1[i];
      e2[i] += o.e2[i];
    }
    for (std::size_t i = 0; i < m1.size(); ++i) {
      m1[i] += o.m1[i];
      m2[i] += o.m2[i];
    }
    b1 += o.b1;
    b2 += o.b2;
  }
};

Acc leaf(const Trajectory& tr, bool second) {
  Acc a;
  a.count = 1;
  for (const auto& s : tr.states) {
    const std::vector<double> zv = s.phase();
    Eigen::Map<const Eigen::VectorXd> z(zv.data(), static_cast<Eigen::Index>(zv.size()));
    const std::vector<double> ev = energy_density(s);
    Eigen::Map<const Eigen::VectorXd> e(ev.data(), static_cast<Eigen::Index>(ev.size()));
    a.z1.push_back(z);
    a.z2.push_back(z.array().square().matrix());
    a.e1.push_back(e);
    a.e2.push_back(e.array().square().matrix());
    if (second) {
      Eigen::MatrixXd zz = z * z.transpose();
      a.m2.push_back(zz.array().square().matrix());
      a.m1.push_back(std::move(zz));
    }
  }
  a.b1 = Eigen::Map<const Eigen::VectorXd>(tr.integrals.data(), kNumBoundaryStats);
  a.b2 = a.b1.array().square().matrix();
  return a;
}

// Pairwise reduction over a fixed index range; tree shape depends only on size.
Acc reduce(std::vector<Acc>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(v[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  Acc left = reduce(v, lo, mid);
  Acc right = reduce(v, mid, hi);
  left.add(right);
  return left;
}

double se_from(double s1, double s2, long long N) {
  if (N < 2) return 0.0;
  const double mean = s1 / N;
  const double var = std::max(0.0, (s2 - N * mean * mean) / (N - 1));
  return std::sqrt(var / N);
}

}  // namespace

double EnsembleStats::profile_r(std::size_t ti, double u) const {
  const int x = std::clamp(static_cast<int>(std::floor(u * (n + 1))), 0, n);
  return mean_r.at(ti)[x];
}

double EnsembleStats::profile_p(std::size_t ti, double u) const {
  const int x = std::clamp(static_cast<int>(std::floor(u * (n + 1))), 0, n);
  return mean_p.at(ti)[x];
}

EnsembleStats run_ensemble(const GibbsSpec& spec, const IntegratorConfig& cfg, const ModelParams& params,
                           const EnsembleOptions& opt) {
  if (opt.n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  cfg.validate();
  spec.validate();
  const int n = params.n;
  const int n_blocks = (opt.n_traj + kBlock - 1) / kBlock;
  std::vector<Acc> blocks(n_blocks);
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (int b = next++; b < n_blocks; b = next++) {
      const int lo = b * kBlock, hi = std::min(opt.n_traj, lo + kBlock);
      std::vector<Acc> leaves;
      leaves.reserve(hi - lo);
      for (int i = lo; i < hi; ++i) {
        std::mt19937_64 rng(derive_seed(opt.master_seed, static_cast<std::uint64_t>(i)));
        ChainState init = sample_initial(spec, params, rng);
        Trajectory tr = run_trajectory(init, cfg, params, rng);
        leaves.push_back(leaf(tr, opt.with_second_moments));
      }
      blocks[b] = reduce(leaves, 0, leaves.size());
    }
  };

  const int nw = std::max(1, std::min(opt.workers, n_blocks));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  Acc tot = reduce(blocks, 0, blocks.size());

  EnsembleStats st;
  st.n = n;
  st.n_traj = opt.n_traj;
  st.times = record_times(cfg, n);
  const long long N = tot.count;
  const int d = phase_dim(n);
  for (std::size_t ti = 0; ti < tot.z1.size(); ++ti) {
    std::vector<double> mr(n + 1, 0.0), mp(n + 1), me(n + 1), sr(n + 1, 0.0), sp(n + 1), se(n + 1);
    Eigen::VectorXd mz(d), sz(d);
    for (int i = 0; i < d; ++i) {
      mz[i] = tot.z1[ti][i] / N;
      sz[i] = se_from(tot.z1[ti][i], tot.z2[ti][i], N);
    }
    for (int x = 1; x <= n; ++x) {
      mr[x] = mz[r_index(n, x)];
      sr[x] = sz[r_index(n, x)];
    }
    for (int x = 0; x <= n; ++x) {
      mp[x] = mz[p_index(n, x)];
      sp[x] = sz[p_index(n, x)];
      me[x] = tot.e1[ti][x] / N;
      se[x] = se_from(tot.e1[ti][x], tot.e2[ti][x], N);
    }
    st.mean_r.push_back(mr);
    st.mean_p.push_back(mp);
    st.energy_profile.push_back(me);
    st.se_r.push_back(sr);
    st.se_p.push_back(sp);
    st.se_E.push_back(se);
    st.mean_phase.push_back(mz);
    st.mean_phase_se.push_back(sz);
    if (opt.with_second_moments) {
      Eigen::MatrixXd M = tot.m1[ti] / static_cast<double>(N);
      Eigen::MatrixXd S(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) S(i, j) = se_from(tot.m1[ti](i, j), tot.m2[ti](i, j), N);
      st.cov.push_back(M - mz * mz.transpose());
      st.second_moment.push_back(std::move(M));
      st.second_moment_se.push_back(std::move(S));
    }
  }
  for (int i = 0; i < kNumBoundaryStats; ++i) {
    st.boundary_mean[i] = tot.b1[i] / N;
    st.boundary_se[i] = se_from(tot.b1[i], tot.b2[i], N);
  }
  return st;
}

void write_ensemble_csv(const EnsembleStats& st, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(12);
  out << "t,x,mean_r,mean_p,mean_E,se_r,se_p,se_E\n";
  for (std::size_t ti = 0; ti < st.times.size(); ++ti)
    for (int x = 0; x <= st.n; ++x)
      out << st.times[ti] << ',' << x << ',' << st.mean_r[ti][x] << ',' << st.mean_p[ti][x] << ','
          << st.energy_profile[ti][x] << ',' << st.se_r[ti][x] << ',' << st.se_p[ti][x] << ',' << st.se_E[ti][x]
          << '\n';
}

}  // namespace flipchain

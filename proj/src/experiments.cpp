#include "flipchain/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "flipchain/ensemble.hpp"
#include "flipchain/integrator.hpp"
#include "flipchain/observable.hpp"
#include "flipchain/pde.hpp"
#include "flipchain/wigner.hpp"
#include "json.hpp"

namespace flipchain {

using std::numbers::pi;

bool Report::pass() const {
  for (const auto& c : checks)
    if (c.gated && !c.pass) return false;
  return true;
}

double Report::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m.value;
  throw std::out_of_range("report has no metric " + name);
}

const Check& Report::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("report has no check " + name);
}

std::string Report::summary_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["claim"] = claim;
  std::ostringstream h;
  h << std::hex << config.hash();
  j["config_hash"] = h.str();
  j["master_seed"] = config.master_seed;
  j["params"] = {{"n", config.params.n},
                 {"gamma", config.params.gamma},
                 {"gamma_tilde", config.params.gamma_tilde},
                 {"t_minus", config.params.t_minus},
                 {"t_plus", config.params.t_plus},
                 {"tau_plus", config.params.tau_plus}};
  nlohmann::ordered_json cj = nlohmann::ordered_json::object();
  for (const auto& k : config_keys()) cj[k] = config_get(config, k);
  j["config"] = cj;
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& m : metrics) {
    // JSON has no infinity or NaN; those are written as strings.
    if (std::isfinite(m.value))
      j["metrics"].push_back({{"name", m.name}, {"value", m.value}});
    else
      j["metrics"].push_back({{"name", m.name}, {"value", std::to_string(m.value)}});
  }
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"gated", c.gated}, {"detail", c.detail}});
  j["warnings"] = warnings;
  j["pass"] = pass();
  j["seconds"] = seconds;
  return j.dump(2);
}

void Report::write(const std::string& dir) const {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(std::filesystem::path(dir) / (experiment + "_summary.json"));
    if (!out) throw std::runtime_error("cannot write summary in " + dir);
    out << summary_json() << '\n';
  }
  for (const auto& t : tables) {
    std::ofstream out(std::filesystem::path(dir) / (experiment + "_" + t.name + ".csv"));
    if (!out) throw std::runtime_error("cannot write table in " + dir);
    out.precision(12);
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  }
}

namespace {

constexpr double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
constexpr double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};

ModelParams at_n(const ModelParams& p, int n) {
  ModelParams q = p;
  q.n = n;
  return q;
}

Eigen::VectorXd means_from(int n, const Profile& r0, const Profile& p0) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(phase_dim(n));
  for (int x = 1; x <= n; ++x) m[r_index(n, x)] = r0(double(x) / n);
  for (int x = 0; x <= n; ++x) m[p_index(n, x)] = p0(double(x) / n);
  return m;
}

// Running trapezoid rule for samples arriving in time order.
struct Trapezoid {
  double total = 0.0;
  double t_prev = 0.0, f_prev = 0.0;
  bool started = false;
  void add(double t, double f) {
    if (started) total += 0.5 * (t - t_prev) * (f + f_prev);
    t_prev = t;
    f_prev = f;
    started = true;
  }
};

double integrate_frames(const MacroPath& path, const Profile& w) {
  Trapezoid tr;
  for (const auto& f : path.frames) tr.add(f.t, integrate_nodal(f.values, w));
  return tr.total;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

Report start(const std::string& name, const std::string& claim, const ExperimentConfig& cfg) {
  cfg.validate();
  Report r;
  r.experiment = name;
  r.claim = claim;
  r.config = cfg;
  return r;
}

void add_fit(Report& rep, const std::string& label, const std::vector<double>& x, const std::vector<double>& y,
             double lo, double hi, bool gated) {
  Check c;
  c.name = label;
  c.gated = gated;
  try {
    const ScalingFit f = fit_loglog(x, y);
    rep.metrics.push_back({label + " slope", f.slope});
    rep.metrics.push_back({label + " fit residual", f.residual});
    c.pass = f.slope_in(lo, hi);
    c.detail = "slope " + fmt(f.slope) + " in [" + fmt(lo) + ", " + fmt(hi) + "]";
  } catch (const std::invalid_argument& e) {
    c.pass = false;
    c.detail = std::string("no fit: ") + e.what();
  }
  rep.checks.push_back(c);
}

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

double embedded_l2_distance(const std::vector<double>& site_values, const std::function<double(double)>& f) {
  const int N = static_cast<int>(site_values.size());
  if (N < 1) throw std::invalid_argument("embedded_l2_distance: empty profile");
  const double h = 1.0 / N;
  double s = 0.0;
  for (int x = 0; x < N; ++x)
    for (int q = 0; q < 5; ++q) {
      const double u = (x + 0.5 + 0.5 * kGaussX[q]) * h;
      const double d = site_values[x] - f(u);
      s += 0.5 * h * kGaussW[q] * d * d;
    }
  return std::sqrt(s);
}

std::vector<double> cell_integrals(int n, const std::function<double(double)>& w) {
  const int N = n + 1;
  const double h = 1.0 / N;
  std::vector<double> c(N, 0.0);
  for (int x = 0; x < N; ++x)
    for (int q = 0; q < 5; ++q) c[x] += 0.5 * h * kGaussW[q] * w((x + 0.5 + 0.5 * kGaussX[q]) * h);
  return c;
}

Report exp_hydro_stretch(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("hydro_stretch",
                     "embedded mean stretch converges in L2 to the heat equation with diffusivity 1/(2 gamma); "
                     "n times the time integral of the summed squared mean momenta stays bounded",
                     cfg);
  const Profile r0 = profile_preset(cfg.profile, FieldKind::Stretch, cfg.params);
  const double pa = cfg.p_amplitude;
  const Profile p0 = [pa](double u) { return pa * std::sin(2 * pi * u); };
  const MacroPath ref = solve_stretch(r0, cfg.params, cfg.t_end, cfg.grid);
  for (const auto& w : ref.warnings) rep.warnings.push_back("pde: " + w);
  const std::size_t last = ref.frames.size() - 1;
  const Profile r_lim = [&](double u) { return ref.at(last, u); };
  const double norm = std::sqrt(integrate_nodal(ref.back().values, r_lim));
  rep.metrics.push_back({"L2 norm of limit", norm});

  Table tab{"scaling", {"n", "l2_error", "rel_error", "n_int_sum_p2_over_n1", "n_int_sum_p2"}, {}};
  std::vector<double> ns, err, stat_norm, stat_sum;
  for (int n : cfg.n_list) {
    const ModelParams prm = at_n(cfg.params, n);
    Trapezoid tr;
    const Eigen::VectorXd mT = evolve_means(means_from(n, r0, p0), prm, 0.0, cfg.t_end, cfg.moments_dtau,
                                            [&](double t, const Eigen::VectorXd& m) {
                                              tr.add(t, m.tail(n + 1).squaredNorm());
                                            });
    std::vector<double> site(n + 1, 0.0);
    for (int x = 1; x <= n; ++x) site[x] = mT[r_index(n, x)];
    const double e = embedded_l2_distance(site, r_lim);
    ns.push_back(n);
    err.push_back(e);
    stat_norm.push_back(n * tr.total / (n + 1));
    stat_sum.push_back(n * tr.total);
    tab.rows.push_back({double(n), e, e / norm, stat_norm.back(), stat_sum.back()});
    rep.metrics.push_back({"l2 error n=" + std::to_string(n), e});
    rep.metrics.push_back({"n int sum p^2/(n+1) n=" + std::to_string(n), stat_norm.back()});
    rep.metrics.push_back({"n int sum p^2 n=" + std::to_string(n), stat_sum.back()});
  }
  rep.tables.push_back(tab);
  rep.checks.push_back({"error decreases over n_list", strictly_decreasing(err), true, "errors " + join(err)});
  const double rel = err.empty() ? INFINITY : err.back() / norm;
  rep.metrics.push_back({"relative error at largest n", rel});
  rep.checks.push_back({"relative error at largest n < 0.05", rel < 0.05, true, "relative error " + fmt(rel)});
  const double s1 = spread_ratio(stat_norm), s2 = spread_ratio(stat_sum);
  rep.metrics.push_back({"spread n int sum p^2/(n+1)", s1});
  rep.metrics.push_back({"spread n int sum p^2", s2});
  rep.checks.push_back({"n int sum p^2/(n+1) within factor 3", s1 <= 3.0, true, "values " + join(stat_norm)});
  rep.checks.push_back({"n int sum p^2 within factor 3", s2 <= 3.0, false, "values " + join(stat_sum)});
  if (ns.size() >= 3) {
    add_fit(rep, "l2 error", ns, err, -INFINITY, 0.0, false);
    add_fit(rep, "n int sum p^2/(n+1)", ns, stat_norm, -INFINITY, INFINITY, false);
  }
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_hydro_energy(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("hydro_energy",
                     "space-time pairing of the mean energy profile with a test function converges to that of "
                     "e_t = (e + r^2/2)_uu/(4 gamma)",
                     cfg);
  const ModelParams& P = cfg.params;
  const double bm = 1.0 / P.t_minus, bp = 1.0 / P.t_plus;
  const Profile beta = [bm, bp](double u) { return bm + (bp - bm) * u; };
  const Profile r0 = profile_preset(cfg.profile, FieldKind::Stretch, P);
  const Profile e0 = [&](double u) { return 1.0 / beta(u) + 0.5 * r0(u) * r0(u); };
  const TestFunction1D G = test_function_preset(cfg.test_function);
  if (std::abs(G.g(0.0)) > 1e-12 || std::abs(G.g(1.0)) > 1e-12) rep.warnings.push_back("test function does not vanish at the boundary");

  const MacroPath rp = solve_stretch(r0, P, cfg.t_end, cfg.grid);
  const MacroPath ep = solve_energy(e0, rp, P, cfg.grid);
  for (const auto& w : rp.warnings) rep.warnings.push_back("stretch pde: " + w);
  for (const auto& w : ep.warnings) rep.warnings.push_back("energy pde: " + w);
  const double pair_pde = integrate_frames(ep, G.g);
  // Negative control: the same equation without the r^2/2 flux.
  ModelParams P0 = P;
  P0.tau_plus = 0.0;
  const MacroPath r_zero = solve_stretch([](double) { return 0.0; }, P0, cfg.t_end, cfg.grid);
  const double pair_abl = integrate_frames(solve_energy(e0, r_zero, P, cfg.grid), G.g);
  rep.metrics.push_back({"pde pairing", pair_pde});
  rep.metrics.push_back({"ablated pde pairing", pair_abl});

  GibbsSpec spec;
  spec.beta_profile = beta;
  spec.tension = 0.0;
  spec.mean_r = r0;
  Table tab{"scaling", {"n", "lattice_pairing", "abs_diff", "rel_diff", "ablation_diff"}, {}};
  std::vector<double> diff, abl;
  for (int n : cfg.n_list) {
    const ModelParams prm = at_n(P, n);
    const std::vector<double> w = cell_integrals(n, G.g);
    Trapezoid tr;
    evolve_observed(moments_from_gibbs(spec, prm), prm, cfg.t_end, cfg.moments_dtau, [&](const MomentState& ms) {
      const std::vector<double> e = energy_profile(ms);
      double s = 0.0;
      for (int x = 0; x <= n; ++x) s += e[x] * w[x];
      tr.add(ms.t_macro, s);
    });
    diff.push_back(std::abs(tr.total - pair_pde));
    abl.push_back(std::abs(tr.total - pair_abl));
    tab.rows.push_back({double(n), tr.total, diff.back(), diff.back() / std::abs(pair_pde), abl.back()});
    rep.metrics.push_back({"lattice pairing n=" + std::to_string(n), tr.total});
    rep.metrics.push_back({"pairing difference n=" + std::to_string(n), diff.back()});
  }
  rep.tables.push_back(tab);
  rep.checks.push_back({"pairing difference decreases over n_list", strictly_decreasing(diff), true, "differences " + join(diff)});
  const double rel = diff.empty() ? INFINITY : diff.back() / std::abs(pair_pde);
  rep.metrics.push_back({"relative difference at largest n", rel});
  rep.checks.push_back({"relative difference at largest n < 0.05", rel < 0.05, true, "relative " + fmt(rel)});
  const bool abl_ok = !diff.empty() && abl.back() > 2.0 * diff.back();
  rep.checks.push_back({"dropping the r^2/2 flux breaks agreement", abl_ok, true,
                        "ablation difference " + fmt(abl.empty() ? 0.0 : abl.back()) + " vs " +
                            fmt(diff.empty() ? 0.0 : diff.back())});
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_equipartition(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("equipartition",
                     "time-integrated test-function pairing of E[r~^2] - E[p~^2] vanishes as n grows", cfg);
  const TestFunction1D g = test_function_preset(cfg.test_function);
  const TestFunction2D G{[g](double, double u) { return g.g(u); }};
  if (!G.vanishes_at_boundary(0.0)) rep.warnings.push_back("test function does not vanish at the boundary");
  Table tab{"scaling", {"n", "functional", "abs_functional"}, {}};
  std::vector<double> ns, mag;
  double worst_cross = 0.0;
  bool cross_ok = true;
  for (int n : cfg.n_list) {
    const ModelParams prm = at_n(cfg.params, n);
    std::vector<double> Gx(n + 1);
    for (int x = 0; x <= n; ++x) Gx[x] = g.g(double(x) / n);
    Trapezoid tr, head;
    CovPath first;
    evolve_observed(moments_from_gibbs(initial_law(cfg.initial, prm), prm), prm, cfg.t_end, cfg.moments_dtau,
                    [&](const MomentState& ms) {
                      double s = 0.0;
                      for (int x = 0; x <= n; ++x) {
                        const int ip = p_index(n, x);
                        double d = -(ms.M(ip, ip) - ms.m[ip] * ms.m[ip]);
                        if (x > 0) {
                          const int ir = r_index(n, x);
                          d += ms.M(ir, ir) - ms.m[ir] * ms.m[ir];
                        }
                        s += Gx[x] * d;
                      }
                      s /= n + 1;
                      tr.add(ms.t_macro, s);
                      if (first.times.size() < 3) {
                        head.add(ms.t_macro, s);
                        first.times.push_back(ms.t_macro);
                        first.cov.push_back(fluctuation_cov(ms));
                      }
                    });
    if (first.times.size() >= 2) {
      const EquipartitionResult er = equipartition_functional(first, G, n);
      const double gap = std::max(std::abs(er.lattice - er.fourier), std::abs(er.lattice - head.total));
      worst_cross = std::max(worst_cross, gap / std::abs(er.lattice));
      cross_ok = cross_ok && gap <= 1e-8 * std::abs(er.lattice) + 1e-15;
    }
    ns.push_back(n);
    mag.push_back(std::abs(tr.total));
    tab.rows.push_back({double(n), tr.total, std::abs(tr.total)});
    rep.metrics.push_back({"functional n=" + std::to_string(n), tr.total});
  }
  rep.tables.push_back(tab);
  rep.metrics.push_back({"lattice/fourier cross-check relative gap", worst_cross});
  rep.checks.push_back({"lattice and Fourier forms agree", cross_ok, true, "relative gap " + fmt(worst_cross)});
  if (mag.size() >= 2) {
    const double ratio = mag.back() / mag.front();
    rep.metrics.push_back({"ratio largest/smallest n", ratio});
    rep.checks.push_back({"magnitude at largest n below half of smallest n", ratio < 0.5, true, "ratio " + fmt(ratio)});
  }
  rep.checks.push_back({"magnitude decreases over n_list", strictly_decreasing(mag), false, "values " + join(mag)});
  if (ns.size() >= 3) add_fit(rep, "equipartition magnitude", ns, mag, -INFINITY, 0.0, false);
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_boundary_scalings(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("boundary_scalings",
                     "boundary momentum statistics decay with n: int|p0-pn|^2 ~ n^-2, int|p0+pn|^2 ~ log(n)/n^2, "
                     "|int pn| ~ 1/n, int sup|p|^2 ~ log^2(n)/n^2",
                     cfg);
  const Profile r0 = profile_preset(cfg.profile, FieldKind::Stretch, cfg.params);
  const double pa = cfg.p_amplitude;
  const Profile p0 = [pa](double u) { return pa * std::sin(2 * pi * u); };
  Table tab{"scaling", {"n", "int_diff2", "int_sum2", "abs_int_pn", "int_sup2"}, {}};
  std::vector<double> ns, diff2, sum2, ipn, sup2;
  for (int n : cfg.n_list) {
    const ModelParams prm = at_n(cfg.params, n);
    Trapezoid a, b, c, d;
    evolve_means(means_from(n, r0, p0), prm, 0.0, cfg.t_end, cfg.moments_dtau, [&](double t, const Eigen::VectorXd& m) {
      const double q0 = m[p_index(n, 0)], qn = m[p_index(n, n)];
      a.add(t, (q0 - qn) * (q0 - qn));
      b.add(t, (q0 + qn) * (q0 + qn));
      c.add(t, qn);
      const double s = m.tail(n + 1).cwiseAbs().maxCoeff();
      d.add(t, s * s);
    });
    ns.push_back(n);
    diff2.push_back(a.total);
    sum2.push_back(b.total);
    ipn.push_back(std::abs(c.total));
    sup2.push_back(d.total);
    tab.rows.push_back({double(n), a.total, b.total, std::abs(c.total), d.total});
  }
  rep.tables.push_back(tab);
  if (cfg.params.tau_plus == 0.0) rep.warnings.push_back("zero tension: |int pn| carries no 1/n drift term");
  add_fit(rep, "|int pn|", ns, ipn, -1.3, -0.8, true);
  add_fit(rep, "int |p0-pn|^2", ns, diff2, -2.4, -1.7, true);
  add_fit(rep, "int sup|p|^2", ns, sup2, -INFINITY, -1.5, true);
  add_fit(rep, "int |p0+pn|^2", ns, sum2, -INFINITY, -1.5, false);
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_mc_vs_oracle(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("mc_vs_oracle", "Monte Carlo means and second moments agree with the exact moment equations", cfg);
  const ModelParams& prm = cfg.params;
  const int n = prm.n, d = phase_dim(n);
  const GibbsSpec spec = initial_law(cfg.initial, prm);
  IntegratorConfig ic = cfg.integrator;
  ic.t_end_macro = cfg.t_end;
  EnsembleOptions opt;
  opt.n_traj = cfg.trajectories;
  opt.master_seed = cfg.master_seed;
  opt.workers = cfg.workers;
  opt.with_second_moments = true;
  const EnsembleStats st = run_ensemble(spec, ic, prm, opt);

  Table tab{"zscores", {"t", "i", "j", "z"}, {}};
  std::vector<double> z;
  MomentState cur = moments_from_gibbs(spec, prm);
  for (std::size_t ti = 1; ti < st.times.size(); ++ti) {
    cur = evolve(cur, prm, st.times[ti], cfg.moments_dtau);
    for (int i = 0; i < d; ++i) {
      const double se = st.mean_phase_se[ti][i];
      if (se > 0) {
        z.push_back((st.mean_phase[ti][i] - cur.m[i]) / se);
        tab.rows.push_back({st.times[ti], double(i), -1.0, z.back()});
      }
      for (int j = i; j < d; ++j) {
        const double s2 = st.second_moment_se[ti](i, j);
        if (!(s2 > 0)) continue;
        z.push_back((st.second_moment[ti](i, j) - cur.M(i, j)) / s2);
        tab.rows.push_back({st.times[ti], double(i), double(j), z.back()});
      }
    }
  }
  rep.tables.push_back(tab);
  std::size_t within = 0, beyond4 = 0;
  double zmax = 0.0;
  for (double v : z) {
    within += std::abs(v) <= 2.0;
    beyond4 += std::abs(v) > 4.0;
    zmax = std::max(zmax, std::abs(v));
  }
  const double frac = z.empty() ? 0.0 : double(within) / z.size();
  rep.metrics.push_back({"z-scores", double(z.size())});
  rep.metrics.push_back({"fraction within 2", frac});
  rep.metrics.push_back({"max |z|", zmax});
  rep.metrics.push_back({"count |z| > 4", double(beyond4)});
  if (beyond4 > 0) rep.warnings.push_back(std::to_string(beyond4) + " z-scores beyond 4");
  rep.checks.push_back({"at least 95% of z-scores within 2", frac >= 0.95, true, "fraction " + fmt(frac)});
  rep.checks.push_back({"no z-score beyond 5", zmax <= 5.0, true, "max " + fmt(zmax)});

  if (cfg.half_step_check) {
    IntegratorConfig ih = ic;
    ih.dtau = 0.5 * ic.dtau;
    ih.record_stride = 2 * ic.record_stride;
    EnsembleOptions oh = opt;
    oh.master_seed = cfg.master_seed + 1;
    const EnsembleStats sh = run_ensemble(spec, ih, prm, oh);
    // Compare the final records only; both runs end at t_end.
    const std::size_t a = st.times.size() - 1, b = sh.times.size() - 1;
    double zsum = 0.0;
    std::size_t cnt = 0, in2 = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const double s = std::hypot(st.second_moment_se[a](i, j), sh.second_moment_se[b](i, j));
        if (!(s > 0)) continue;
        const double v = (st.second_moment[a](i, j) - sh.second_moment[b](i, j)) / s;
        zsum += v;
        in2 += std::abs(v) <= 2.0;
        ++cnt;
      }
    const double mean_z = cnt ? zsum / cnt : 0.0;
    rep.metrics.push_back({"half step mean z", mean_z});
    rep.metrics.push_back({"half step fraction within 2", cnt ? double(in2) / cnt : 0.0});
    rep.checks.push_back({"halving dtau gives no systematic shift", cnt && double(in2) / cnt >= 0.9, false,
                          "mean z " + fmt(mean_z)});
  }
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_generator_identities(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("generator_identities",
                     "fluctuation-dissipation identities for g_x and h_x and the boundary energy evolution hold exactly",
                     cfg);
  const ModelParams& prm = cfg.params;
  const int n = prm.n;
  const double n2 = double(n) * n;
  std::mt19937_64 rng(cfg.master_seed);
  double wg = 0, wh = 0, w0 = 0, wn = 0;
  for (int rep_i = 0; rep_i < cfg.trajectories; ++rep_i) {
    std::normal_distribution<double> nd(0.0, 1.0 + rep_i % 5);
    ChainState s(n);
    for (auto& v : s.r) v = nd(rng);
    for (auto& v : s.p) v = nd(rng);
    double z2 = 1.0;
    for (double v : s.r) z2 += v * v;
    for (double v : s.p) z2 += v * v;
    for (int x = 1; x < n; ++x) wg = std::max(wg, std::abs(fd_residual_g(s, x, prm)) / z2);
    for (int x = 2; x <= n - 2; ++x) wh = std::max(wh, std::abs(fd_residual_h(s, x, prm)) / z2);
    const double l0 = generator_apply(energy_observable(n, 0), s, prm);
    const double e0 = -n2 * current(s, 0) + prm.gamma_tilde * n2 * (prm.t_minus - s.p[0] * s.p[0]);
    w0 = std::max(w0, std::abs(l0 - e0) / (n2 * z2));
    const double ln = generator_apply(energy_observable(n, n), s, prm);
    const double en =
        n2 * (current(s, n - 1) + prm.tau_plus * s.p[n]) + prm.gamma_tilde * n2 * (prm.t_plus - s.p[n] * s.p[n]);
    wn = std::max(wn, std::abs(ln - en) / (n2 * z2));
  }
  const std::pair<const char*, double> rows[] = {
      {"g identity", wg}, {"h identity", wh}, {"left boundary energy", w0}, {"right boundary energy", wn}};
  for (const auto& [name, v] : rows) {
    rep.metrics.push_back({std::string(name) + " worst relative residual", v});
    rep.checks.push_back({std::string(name) + " residual <= 1e-10", v <= 1e-10, true, "worst " + fmt(v)});
  }
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_energy_balance(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("energy_balance",
                     "the fluctuation energy functional obeys the thermostat/injection/dissipation balance", cfg);
  const ModelParams& prm = cfg.params;
  const int n = prm.n;
  const double n2 = double(n) * n;
  const MomentState s0 = moments_from_gibbs(initial_law(cfg.initial, prm), prm);
  // dt is a microscopic time spacing, the unit of the integrator step. The
  // order is measured above the roundoff floor of the centered difference,
  // which sets in near dt = 2e-4; the window is a multiple of every dt.
  const std::vector<double> dts = {1.6e-3, 8e-4, 4e-4, 1e-4};
  const double t_target = 0.2048 / n2;
  Table tab{"residuals", {"dt_micro", "residual"}, {}};
  std::vector<double> res;
  for (double dt : dts) {
    std::vector<MomentState> path;
    evolve_observed(s0, prm, t_target, dt, [&](const MomentState& m) { path.push_back(m); });
    res.push_back(wigner_balance_residual(path, prm, dt / n2));
    tab.rows.push_back({dt, res.back()});
    rep.metrics.push_back({"residual dt=" + fmt(dt), res.back()});
  }
  rep.tables.push_back(tab);
  {
    // Same spacing read as macroscopic time: dtau = 1e-4 n^2.
    std::vector<MomentState> path;
    evolve_observed(s0, prm, 64 * 1e-4, 1e-4 * n2, [&](const MomentState& m) { path.push_back(m); });
    const double r = wigner_balance_residual(path, prm, 1e-4);
    rep.metrics.push_back({"residual at macroscopic dt=1e-4", r});
    rep.checks.push_back({"residual < 1e-6 at macroscopic dt = 1e-4", r < 1e-6, false, "residual " + fmt(r)});
  }
  const BalanceTerms b = balance_terms(s0, prm);
  rep.metrics.push_back({"initial |balance rhs|", std::abs(b.total())});
  bool order_ok = true;
  std::vector<double> orders;
  for (std::size_t i = 1; i + 1 < res.size(); ++i) {
    orders.push_back(std::log2(res[i - 1] / res[i]));
    order_ok = order_ok && orders.back() >= 1.8 && orders.back() <= 2.2;
  }
  for (std::size_t i = 0; i < orders.size(); ++i) rep.metrics.push_back({"order " + std::to_string(i + 1), orders[i]});
  rep.checks.push_back({"measured order in [1.8, 2.2]", order_ok, true, "orders " + join(orders)});
  rep.checks.push_back({"residual < 1e-6 at microscopic dt = 1e-4", res.back() < 1e-6, true, "residual " + fmt(res.back())});
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_spectral(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("spectral", "dispersion roots, closed-form c_n and the Laplace-domain bounds hold uniformly in n", cfg);
  const ModelParams& prm = cfg.params;
  double disp = 0.0;
  for (double g : {0.5, 1.0, 2.0})
    for (int n : cfg.n_list)
      for (int j = 0; j <= n; ++j) {
        const double k = double(j) / (n + 1);
        const DispersionPoint dp = dispersion(k, g);
        disp = std::max({disp, std::abs(dispersion_poly(dp.lambda_plus, k, g)),
                         std::abs(dispersion_poly(dp.lambda_minus, k, g))});
      }
  rep.metrics.push_back({"max dispersion residual", disp});
  rep.checks.push_back({"dispersion residual <= 1e-12", disp <= 1e-12, true, "max " + fmt(disp)});

  double cgap = 0.0;
  int ambiguous = 0;
  for (int n : cfg.n_list)
    for (double eta : default_eta_grid()) {
      try {
        const cplx direct = eval_functions(eta, n, prm, InitialSpectra::zero(n)).c_n;
        const cplx closed = c_closed_form(eta, n, prm.gamma);
        cgap = std::max(cgap, std::abs(direct - closed) / std::max(1.0, std::abs(direct)));
      } catch (const std::domain_error&) {
        ++ambiguous;
      }
    }
  if (ambiguous) rep.warnings.push_back(std::to_string(ambiguous) + " eta values with ambiguous Joukowski branch skipped");
  rep.metrics.push_back({"c_n closed form gap", cgap});
  rep.checks.push_back({"c_n closed form matches direct sum to 1e-10", cgap <= 1e-10, true, "gap " + fmt(cgap)});

  const auto smooth = [](int n) {
    return InitialSpectra::fourier_series(n, {0.7, -0.3, 0.2, 0.1}, {0.5, 0.25, -0.1, 0.05}, {0.4, 0.2, -0.2, 0.1},
                                          {-0.3, 0.15, 0.1, 0.05});
  };
  const CertifyReport cr = appendix_certify(cfg.n_list, default_eta_grid(), prm, smooth);
  Table rows{"bounds", {"n", "bound_id", "fitted", "finite", "pass", "gated"}, {}};
  std::vector<std::string> names;
  bool rows_ok = true;
  for (const auto& r : cr.rows) {
    auto it = std::find(names.begin(), names.end(), r.bound);
    if (it == names.end()) {
      names.push_back(r.bound);
      it = names.end() - 1;
    }
    rows.rows.push_back({double(r.n), double(it - names.begin()), r.fitted, double(r.finite), double(r.pass), double(r.gated)});
    if (r.gated && !r.pass) rows_ok = false;
    rep.metrics.push_back({r.bound + " n=" + std::to_string(r.n), r.fitted});
  }
  rep.tables.push_back(rows);
  rep.checks.push_back({"all gated bound checks pass at every n", rows_ok, true, ""});
  for (const auto& [b, dr] : cr.drift) {
    rep.metrics.push_back({"drift " + b, dr});
    rep.checks.push_back({"drift <= 2: " + b, dr <= 2.0, true, "drift " + fmt(dr)});
  }
  for (const auto& r : cr.rows)
    if (!r.gated) rep.warnings.push_back("report-only bound '" + r.bound + "' n=" + std::to_string(r.n) + " fitted " + fmt(r.fitted));

  const int nq = 1 << 14;
  const double t1 = 10, t2 = 1e4;
  const double slope =
      std::log(kernel_Q(2, t2, nq, prm.gamma) / kernel_Q(2, t1, nq, prm.gamma)) / std::log((1 + t2) / (1 + t1));
  rep.metrics.push_back({"Q2 decay slope", slope});
  rep.checks.push_back({"Q2 decay slope in [-1.6, -1.4]", slope >= -1.6 && slope <= -1.4, true, "slope " + fmt(slope)});
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_pde(const ExperimentConfig& cfg) {
  Clock clk;
  Report rep = start("pde", "Crank-Nicolson solvers are second order in space and time", cfg);
  ModelParams P = cfg.params;
  const double g = P.gamma;
  const double t = 0.1;
  auto sine_err = [&](int m, double dt) {
    ModelParams q = P;
    q.tau_plus = 0.0;
    const MacroPath path = solve_stretch([](double u) { return std::sin(pi * u); }, q, t, Grid1D{m, dt});
    double e = 0.0;
    for (int j = 0; j <= m; ++j)
      e = std::max(e, std::abs(path.back().values[j] - std::exp(-pi * pi * t / (2 * g)) * std::sin(pi * j / double(m))));
    return e;
  };
  auto orders_of = [](const std::vector<double>& e) {
    std::vector<double> o;
    for (std::size_t i = 1; i < e.size(); ++i) o.push_back(std::log2(e[i - 1] / e[i]));
    return o;
  };
  auto in_band = [](const std::vector<double>& o) {
    return std::all_of(o.begin(), o.end(), [](double v) { return v >= 1.8 && v <= 2.2; });
  };
  Table tab{"convergence", {"field", "axis", "m", "dt", "error"}, {}};
  auto record = [&](const std::string& label, double field, double axis, const std::vector<int>& ms,
                    const std::vector<double>& dts, const std::vector<double>& e) {
    for (std::size_t i = 0; i < e.size(); ++i) tab.rows.push_back({field, axis, double(ms[i]), dts[i], e[i]});
    const auto o = orders_of(e);
    for (std::size_t i = 0; i < o.size(); ++i) rep.metrics.push_back({label + " order " + std::to_string(i + 1), o[i]});
    rep.checks.push_back({label + " order in [1.8, 2.2]", in_band(o), true, "orders " + join(o)});
  };

  const double e256 = sine_err(cfg.grid.m, cfg.grid.dt);
  rep.metrics.push_back({"sine mode error", e256});
  rep.checks.push_back({"sine mode closed form to 1e-4 at m = " + std::to_string(cfg.grid.m), e256 < 1e-4, true,
                        "error " + fmt(e256)});

  {
    const std::vector<int> ms = {16, 32, 64, 128};
    const std::vector<double> dts(ms.size(), 1e-5);
    std::vector<double> e;
    for (int m : ms) e.push_back(sine_err(m, 1e-5));
    record("stretch space", 0, 0, ms, dts, e);
  }
  {
    // Same grid, so the spatial error cancels against the fine-step reference.
    const int m = 256;
    ModelParams q = P;
    q.tau_plus = 0.0;
    const Profile s = [](double u) { return std::sin(pi * u); };
    const auto ref = solve_stretch(s, q, t, Grid1D{m, 1e-4}).back().values;
    const std::vector<double> dts = {0.02, 0.01, 0.005};
    std::vector<double> e;
    for (double dt : dts) {
      const auto v = solve_stretch(s, q, t, Grid1D{m, dt}).back().values;
      double w = 0;
      for (int j = 0; j <= m; ++j) w = std::max(w, std::abs(v[j] - ref[j]));
      e.push_back(w);
    }
    record("stretch time", 0, 1, std::vector<int>(3, m), dts, e);
  }

  P.tau_plus = P.tau_plus == 0.0 ? 0.5 : P.tau_plus;
  const double te = 0.05;
  const Profile r0 = [&](double u) { return P.tau_plus * u + 0.4 * std::sin(pi * u); };
  const Profile e0 = [&](double u) { return stationary_energy(u, P) + 0.3 * std::sin(2 * pi * u); };
  auto energy = [&](int m, double dt) {
    const Grid1D gr{m, dt};
    return solve_energy(e0, solve_stretch(r0, P, te, gr), P, gr).back().values;
  };
  {
    const int mref = 1024;
    const auto ref = energy(mref, 2e-5);
    const std::vector<int> ms = {32, 64, 128};
    const std::vector<double> dts(ms.size(), 2e-5);
    std::vector<double> e;
    for (int m : ms) {
      const auto v = energy(m, 2e-5);
      double w = 0;
      for (int j = 0; j <= m; ++j) w = std::max(w, std::abs(v[j] - ref[j * (mref / m)]));
      e.push_back(w);
    }
    record("energy space", 1, 0, ms, dts, e);
  }
  {
    const int m = 128;
    const auto ref = energy(m, 1e-5);
    const std::vector<double> dts = {0.01, 0.005, 0.0025};
    std::vector<double> e;
    for (double dt : dts) {
      const auto v = energy(m, dt);
      double w = 0;
      for (int j = 0; j <= m; ++j) w = std::max(w, std::abs(v[j] - ref[j]));
      e.push_back(w);
    }
    record("energy time", 1, 1, std::vector<int>(3, m), dts, e);
  }
  rep.tables.push_back(tab);
  rep.seconds = clk.seconds();
  return rep;
}

Report assumptions_check(const std::function<MomentState(int)>& initial, const ModelParams& params,
                         const std::vector<int>& n_list, const std::function<InitialSpectra(int)>& spectra) {
  Clock clk;
  ExperimentConfig cfg;
  cfg.experiment = "assumptions";
  cfg.params = params;
  cfg.n_list = n_list;
  Report rep = start("assumptions",
                     "initial energy per site, mean spectra and covariance l2 sums stay bounded in n", cfg);
  const std::vector<std::string> names = {"energy per site", "sup |r^|", "sup |p^|", "pp covariance sum",
                                          "rr covariance sum", "pr covariance sum"};
  std::vector<std::vector<double>> vals(names.size());
  Table tab{"bounds", {"n", "energy", "sup_r_hat", "sup_p_hat", "cov_pp", "cov_rr", "cov_pr"}, {}};
  for (int n : n_list) {
    const MomentState ms = initial(n);
    if (ms.n() != n) throw std::invalid_argument("assumptions_check: initial state has the wrong size");
    double e = 0.0;
    for (double v : energy_profile(ms)) e += v;
    e /= n + 1;
    const InitialSpectra sp = spectra ? spectra(n) : InitialSpectra::from_means(ms.m);
    double sr = 0.0, spp = 0.0;
    for (const auto& v : sp.r_hat) sr = std::max(sr, std::abs(v));
    for (const auto& v : sp.p_hat) spp = std::max(spp, std::abs(v));
    const Eigen::MatrixXd C = fluctuation_cov(ms);
    double cpp = 0.0, crr = 0.0, cpr = 0.0;
    for (int x = 0; x <= n; ++x)
      for (int y = 0; y <= n; ++y) {
        cpp += std::pow(C(p_index(n, x), p_index(n, y)), 2);
        if (x > 0 && y > 0) crr += std::pow(C(r_index(n, x), r_index(n, y)), 2);
        if (y > 0) cpr += std::pow(C(p_index(n, x), r_index(n, y)), 2);
      }
    const double row[] = {e, sr, spp, cpp / (n + 1), crr / (n + 1), cpr / (n + 1)};
    std::vector<double> trow{double(n)};
    for (std::size_t i = 0; i < names.size(); ++i) {
      vals[i].push_back(row[i]);
      trow.push_back(row[i]);
    }
    tab.rows.push_back(trow);
  }
  rep.tables.push_back(tab);
  std::vector<double> ns(n_list.begin(), n_list.end());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& v = vals[i];
    const double vmax = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    bool bounded;
    std::string detail;
    if (vmax <= 1e-12) {
      bounded = true;
      detail = "identically zero";
    } else if (ns.size() >= 3 && *std::min_element(v.begin(), v.end()) > 0) {
      const ScalingFit f = fit_loglog(ns, v);
      bounded = f.slope <= 0.25;
      detail = "log-log slope " + fmt(f.slope);
      rep.metrics.push_back({names[i] + " slope", f.slope});
    } else {
      const double r = spread_ratio(v);
      bounded = r <= 2.0;
      detail = "spread " + fmt(r);
    }
    rep.metrics.push_back({names[i] + " max", vmax});
    rep.checks.push_back({names[i] + " bounded", bounded, true, detail});
  }
  rep.seconds = clk.seconds();
  return rep;
}

Report exp_assumptions(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto init = [&](int n) {
    const ModelParams prm = at_n(cfg.params, n);
    return moments_from_gibbs(initial_law(cfg.initial, prm), prm);
  };
  Report r = assumptions_check(init, cfg.params, cfg.n_list);
  r.config = cfg;
  return r;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "generator_identities", "mc_vs_oracle", "hydro_stretch", "hydro_energy", "equipartition",
      "boundary_scalings",    "energy_balance", "spectral",    "pde",          "assumptions"};
  return names;
}

Report run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  Report r;
  if (name == "hydro_stretch")
    r = exp_hydro_stretch(cfg);
  else if (name == "hydro_energy")
    r = exp_hydro_energy(cfg);
  else if (name == "equipartition")
    r = exp_equipartition(cfg);
  else if (name == "boundary_scalings")
    r = exp_boundary_scalings(cfg);
  else if (name == "mc_vs_oracle")
    r = exp_mc_vs_oracle(cfg);
  else if (name == "generator_identities")
    r = exp_generator_identities(cfg);
  else if (name == "energy_balance")
    r = exp_energy_balance(cfg);
  else if (name == "spectral")
    r = exp_spectral(cfg);
  else if (name == "pde")
    r = exp_pde(cfg);
  else if (name == "assumptions")
    r = exp_assumptions(cfg);
  else
    throw std::invalid_argument("unknown experiment: " + name);
  r.write(cfg.output_dir);
  return r;
}

}  // namespace flipchain

#include "flipchain/pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace flipchain {

namespace {

constexpr std::array<double, 6> kGaussX = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831909,
                                           0.2386191860831909,  0.6612093864662645,  0.9324695142031521};
constexpr std::array<double, 6> kGaussW = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                           0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

// Solves a x = rhs for the constant tridiagonal matrix (lo, di, up) on the
// interior unknowns. Thomas algorithm.
void thomas(double lo, double di, double up, std::vector<double>& rhs) {
  const std::size_t k = rhs.size();
  if (k == 0) return;
  std::vector<double> c(k);
  c[0] = up / di;
  rhs[0] /= di;
  for (std::size_t i = 1; i < k; ++i) {
    const double den = di - lo * c[i - 1];
    c[i] = up / den;
    rhs[i] = (rhs[i] - lo * rhs[i - 1]) / den;
  }
  for (std::size_t i = k - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

int n_steps(double t_end, double dt) {
  if (t_end <= 0) return 0;
  return std::max(1, static_cast<int>(std::lround(t_end / dt)));
}

}  // namespace

void Grid1D::validate() const {
  if (m < 8) throw std::invalid_argument("Grid1D: m must be >= 8");
  if (!(dt > 0)) throw std::invalid_argument("Grid1D: dt must be positive");
}

double MacroPath::at(std::size_t i, double u) const {
  const auto& v = frames.at(i).values;
  const int m = static_cast<int>(v.size()) - 1;
  const double s = std::clamp(u, 0.0, 1.0) * m;
  const int j = std::min(m - 1, static_cast<int>(s));
  const double w = s - j;
  return (1 - w) * v[j] + w * v[j + 1];
}

MacroPath solve_stretch(const Profile& r0, const ModelParams& params, double t_end, const Grid1D& grid) {
  grid.validate();
  const int m = grid.m;
  const int steps = n_steps(t_end, grid.dt);
  const double dt = steps > 0 ? t_end / steps : grid.dt;
  const double D = 1.0 / (2.0 * params.gamma);
  const double lam = D * dt / (grid.du() * grid.du());

  MacroPath path;
  path.grid = grid;
  path.grid.dt = dt;
  path.kind = FieldKind::Stretch;
  MacroField f;
  f.kind = FieldKind::Stretch;
  f.values.resize(m + 1);
  for (int j = 0; j <= m; ++j) f.values[j] = r0(grid.u(j));
  if (std::abs(f.values[0]) > 1e-12 || std::abs(f.values[m] - params.tau_plus) > 1e-12)
    path.warnings.push_back("initial stretch profile does not match boundary values");
  if (dt > params.gamma * grid.du() * grid.du())
    path.warnings.push_back("dt exceeds gamma*du^2; discrete maximum principle not guaranteed");
  double lo_bound = std::min({0.0, params.tau_plus, *std::min_element(f.values.begin(), f.values.end())});
  double hi_bound = std::max({0.0, params.tau_plus, *std::max_element(f.values.begin(), f.values.end())});
  f.values[0] = 0.0;
  f.values[m] = params.tau_plus;
  path.frames.push_back(f);

  std::vector<double> rhs(m - 1);
  for (int s = 1; s <= steps; ++s) {
    const auto& v = path.frames.back().values;
    for (int j = 1; j < m; ++j) rhs[j - 1] = v[j] + 0.5 * lam * (v[j - 1] - 2 * v[j] + v[j + 1]);
    // Dirichlet data at the new level.
    rhs[m - 2] += 0.5 * lam * params.tau_plus;
    thomas(-0.5 * lam, 1.0 + lam, -0.5 * lam, rhs);
    MacroField nf;
    nf.kind = FieldKind::Stretch;
    nf.t = s * dt;
    nf.values.resize(m + 1);
    nf.values[0] = 0.0;
    nf.values[m] = params.tau_plus;
    std::copy(rhs.begin(), rhs.end(), nf.values.begin() + 1);
    for (double a : nf.values)
      if (!std::isfinite(a)) throw std::runtime_error("solve_stretch: non-finite value");
    const auto [mn, mx] = std::minmax_element(nf.values.begin(), nf.values.end());
    if (*mn < lo_bound - 1e-12 || *mx > hi_bound + 1e-12) path.max_principle_ok = false;
    path.frames.push_back(std::move(nf));
  }
  return path;
}

MacroPath solve_energy(const Profile& e0, const MacroPath& r_path, const ModelParams& params, const Grid1D& grid) {
  grid.validate();
  const int m = grid.m;
  if (r_path.grid.m != m) throw std::invalid_argument("solve_energy: stretch path grid mismatch");
  const int steps = static_cast<int>(r_path.frames.size()) - 1;
  const double dt = r_path.grid.dt;
  const double D = 1.0 / (4.0 * params.gamma);
  const double lam = D * dt / (grid.du() * grid.du());
  const double eL = params.t_minus, eR = params.t_plus + 0.5 * params.tau_plus * params.tau_plus;

  MacroPath path;
  path.grid = r_path.grid;
  path.kind = FieldKind::Energy;
  MacroField f;
  f.kind = FieldKind::Energy;
  f.values.resize(m + 1);
  for (int j = 0; j <= m; ++j) f.values[j] = e0(grid.u(j));
  if (std::abs(f.values[0] - eL) > 1e-12 || std::abs(f.values[m] - eR) > 1e-12)
    path.warnings.push_back("initial energy profile does not match boundary values");
  f.values[0] = eL;
  f.values[m] = eR;
  path.frames.push_back(f);

  std::vector<double> rhs(m - 1), src(m + 1);
  for (int s = 1; s <= steps; ++s) {
    const auto& v = path.frames.back().values;
    const auto& ra = r_path.frames[s - 1].values;
    const auto& rb = r_path.frames[s].values;
    for (int j = 0; j <= m; ++j) src[j] = 0.25 * (ra[j] * ra[j] + rb[j] * rb[j]);
    for (int j = 1; j < m; ++j)
      rhs[j - 1] = v[j] + 0.5 * lam * (v[j - 1] - 2 * v[j] + v[j + 1]) + lam * (src[j - 1] - 2 * src[j] + src[j + 1]);
    rhs[0] += 0.5 * lam * eL;
    rhs[m - 2] += 0.5 * lam * eR;
    thomas(-0.5 * lam, 1.0 + lam, -0.5 * lam, rhs);
    MacroField nf;
    nf.kind = FieldKind::Energy;
    nf.t = r_path.frames[s].t;
    nf.values.resize(m + 1);
    nf.values[0] = eL;
    nf.values[m] = eR;
    std::copy(rhs.begin(), rhs.end(), nf.values.begin() + 1);
    for (double a : nf.values)
      if (!std::isfinite(a)) throw std::runtime_error("solve_energy: non-finite value");
    path.frames.push_back(std::move(nf));
  }
  return path;
}

TestFunction1D test_function_preset(const std::string& name) {
  using std::numbers::pi;
  if (name == "parabola")
    return {name, [](double u) { return u * (1 - u); }, [](double u) { return 1 - 2 * u; }, [](double) { return -2.0; }};
  if (name == "sine")
    return {name, [](double u) { return std::sin(pi * u); }, [](double u) { return pi * std::cos(pi * u); },
            [](double u) { return -pi * pi * std::sin(pi * u); }};
  if (name == "bump")
    return {name, [](double u) { return std::pow(std::sin(pi * u), 2); },
            [](double u) { return pi * std::sin(2 * pi * u); },
            [](double u) { return 2 * pi * pi * std::cos(2 * pi * u); }};
  throw std::invalid_argument("unknown test function preset: " + name);
}

double integrate_nodal(const std::vector<double>& f, const Profile& w) {
  const int m = static_cast<int>(f.size()) - 1;
  if (m < 2) throw std::invalid_argument("integrate_nodal: need at least 2 cells");
  const double h = 1.0 / m;
  double total = 0.0;
  auto pair = [&](int j) {
    // Quadratic through nodes j, j+1, j+2 on [u_j, u_j + 2h].
    const double a = j * h;
    double s = 0.0;
    for (int q = 0; q < 6; ++q) {
      const double xi = 1.0 + kGaussX[q];  // in [0,2], units of h
      const double l0 = 0.5 * (xi - 1) * (xi - 2), l1 = -xi * (xi - 2), l2 = 0.5 * xi * (xi - 1);
      const double fv = l0 * f[j] + l1 * f[j + 1] + l2 * f[j + 2];
      s += kGaussW[q] * fv * w(a + xi * h);
    }
    return s * h;
  };
  int j = 0;
  for (; j + 2 <= m; j += 2) total += pair(j);
  if (j < m) {
    // Odd m: last cell handled with a linear interpolant.
    const double a = j * h;
    for (int q = 0; q < 6; ++q) {
      const double xi = 0.5 * (1 + kGaussX[q]);
      total += 0.5 * h * kGaussW[q] * ((1 - xi) * f[j] + xi * f[j + 1]) * w(a + xi * h);
    }
  }
  return total;
}

double weak_residual(const MacroPath& path, const TestFunction1D& G, const ModelParams& params,
                     const MacroPath* r_path) {
  if (path.frames.empty()) return 0.0;
  const bool energy = path.kind == FieldKind::Energy;
  if (energy && (!r_path || r_path->frames.size() != path.frames.size()))
    throw std::invalid_argument("weak_residual: energy path needs a matching stretch path");
  const double D = energy ? 1.0 / (4.0 * params.gamma) : 1.0 / (2.0 * params.gamma);
  const double g1R = G.g1(1.0), g1L = G.g1(0.0);
  const double tau = params.tau_plus;
  // Boundary flux rate: stretch -D G'(1) tau; energy -D (G'(1)(T+ + tau^2) - G'(0) T-).
  const double flux = energy ? -D * (g1R * (params.t_plus + tau * tau) - g1L * params.t_minus) : -D * g1R * tau;

  const std::vector<double>& f0 = path.frames[0].values;
  const double base = integrate_nodal(f0, G.g);
  auto bulk = [&](std::size_t i) {
    const auto& v = path.frames[i].values;
    if (!energy) return integrate_nodal(v, G.g2);
    std::vector<double> w(v.size());
    const auto& r = r_path->frames[i].values;
    for (std::size_t j = 0; j < v.size(); ++j) w[j] = v[j] + 0.5 * r[j] * r[j];
    return integrate_nodal(w, G.g2);
  };

  double sup = 0.0, acc = 0.0;
  double prev = bulk(0);
  for (std::size_t i = 1; i < path.frames.size(); ++i) {
    const double cur = bulk(i);
    const double dt = path.frames[i].t - path.frames[i - 1].t;
    acc += 0.5 * dt * (prev + cur);
    prev = cur;
    const double t = path.frames[i].t - path.frames[0].t;
    const double lhs = integrate_nodal(path.frames[i].values, G.g) - base;
    sup = std::max(sup, std::abs(lhs - D * acc - flux * t));
  }
  return sup;
}

Profile profile_preset(const std::string& name, FieldKind kind, const ModelParams& params) {
  using std::numbers::pi;
  const double tau = params.tau_plus;
  if (kind == FieldKind::Stretch) {
    if (name == "linear-tension") return [tau](double u) { return tau * u; };
    if (name == "sine") return [tau](double u) { return tau * u + std::sin(pi * u); };
    if (name == "constant") return [tau](double) { return tau; };
  } else {
    const double eL = params.t_minus, eR = params.t_plus + 0.5 * tau * tau;
    if (name == "linear-tension") return [params](double u) { return stationary_energy(u, params); };
    if (name == "sine") return [eL, eR](double u) { return eL + (eR - eL) * u + 0.5 * std::sin(pi * u); };
    if (name == "constant") return [eL](double) { return eL; };
  }
  throw std::invalid_argument("unknown profile preset: " + name);
}

Profile profile_from_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double u, v;
    if (ls >> u >> v) pts.emplace_back(u, v);
  }
  if (pts.size() < 2) throw std::runtime_error("profile CSV needs at least two numeric rows: " + file);
  std::sort(pts.begin(), pts.end());
  return [pts](double u) {
    if (u <= pts.front().first) return pts.front().second;
    if (u >= pts.back().first) return pts.back().second;
    auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(u, -std::numeric_limits<double>::infinity()));
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (u - a.first) / (b.first - a.first);
    return (1 - w) * a.second + w * b.second;
  };
}

double stationary_energy(double u, const ModelParams& params) {
  const double tau2 = params.tau_plus * params.tau_plus;
  return params.t_minus + (params.t_plus + tau2 - params.t_minus) * u - 0.5 * tau2 * u * u;
}

void write_macro_csv(const MacroPath& path, const std::string& file, int frame_stride) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file);
  out.precision(12);
  out << "t,u,value\n";
  const std::size_t nf = path.frames.size();
  for (std::size_t i = 0; i < nf; ++i) {
    if (i % frame_stride != 0 && i + 1 != nf) continue;
    const auto& f = path.frames[i];
    for (std::size_t j = 0; j < f.values.size(); ++j)
      out << f.t << ',' << path.grid.u(static_cast<int>(j)) << ',' << f.values[j] << '\n';
  }
}

}  // namespace flipchain

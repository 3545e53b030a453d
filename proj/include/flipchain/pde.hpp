#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flipchain/model.hpp"

namespace flipchain {

struct Grid1D {
  int m = 256;         // cells; nodes u_j = j/m, j = 0..m
  double dt = 1e-4;    // time step

  void validate() const;
  double du() const { return 1.0 / m; }
  double u(int j) const { return static_cast<double>(j) / m; }
};

enum class FieldKind { Stretch, Energy };

struct MacroField {
  std::vector<double> values;  // nodal values, size m+1
  double t = 0.0;
  FieldKind kind = FieldKind::Stretch;
};

struct MacroPath {
  Grid1D grid;
  FieldKind kind = FieldKind::Stretch;
  std::vector<MacroField> frames;  // every time step, frames[0] is the initial datum
  std::vector<std::string> warnings;
  bool max_principle_ok = true;

  const MacroField& back() const { return frames.back(); }
  // Linear interpolation in u of frame i.
  double at(std::size_t i, double u) const;
};

using Profile = std::function<double(double)>;

// r_t = (1/(2 gamma)) r_uu, r(t,0) = 0, r(t,1) = tau_plus.
MacroPath solve_stretch(const Profile& r0, const ModelParams& params, double t_end, const Grid1D& grid);

// e_t = (1/(4 gamma)) (e + r^2/2)_uu, e(t,0) = T-, e(t,1) = T+ + tau_plus^2/2.
MacroPath solve_energy(const Profile& e0, const MacroPath& r_path, const ModelParams& params, const Grid1D& grid);

// Test function on [0,1] vanishing at both ends, with two derivatives.
struct TestFunction1D {
  std::string name;
  Profile g, g1, g2;
};
TestFunction1D test_function_preset(const std::string& name);  // "parabola" | "sine" | "bump"

// sup over frames of the weak-form residual. r_path is required for energy paths.
double weak_residual(const MacroPath& path, const TestFunction1D& G, const ModelParams& params,
                     const MacroPath* r_path = nullptr);

// Named initial profiles: "linear-tension", "sine", "constant".
Profile profile_preset(const std::string& name, FieldKind kind, const ModelParams& params);
// Two-column CSV (u,value), linearly interpolated.
Profile profile_from_csv(const std::string& file);

// Stationary energy profile for r = tau u.
double stationary_energy(double u, const ModelParams& params);

// Integral over [0,1] of f * w where f is given at the m+1 nodes. Piecewise
// quadratic interpolation on cell pairs (m even), six-point Gauss per pair.
double integrate_nodal(const std::vector<double>& f, const Profile& w);

// Columns: t,u,value
void write_macro_csv(const MacroPath& path, const std::string& file, int frame_stride = 1);

}  // namespace flipchain

#include "flipchain/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flipchain {

ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_loglog: at least 3 points required");
  ScalingFit f;
  f.x = x;
  f.y = y;
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("fit_loglog: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  if (den <= 1e-12 * k * sxx) throw std::invalid_argument("fit_loglog: degenerate x values");
  f.slope = (k * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / k;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - f.intercept - f.slope * std::log(x[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / k);
  return f;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

double spread_ratio(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  if (!(*mn > 0)) return std::numeric_limits<double>::infinity();
  return *mx / *mn;
}

}  // namespace flipchain

#pragma once

#include <string>
#include <vector>

namespace flipchain {

// Least-squares fit of log y = intercept + slope log x.
struct ScalingFit {
  std::vector<double> x, y;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of the log residuals

  bool slope_in(double lo, double hi) const { return slope >= lo && slope <= hi; }
};

// Needs at least three points with x > 0 and y > 0.
ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

bool strictly_decreasing(const std::vector<double>& v);

// max(v)/min(v) over positive entries; infinity if some entry is not positive.
double spread_ratio(const std::vector<double>& v);

}  // namespace flipchain

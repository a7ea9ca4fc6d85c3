#include "ttsa/slope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ttsa {

SlopeFit fit_rate(const std::vector<double>& k,
                  const std::vector<double>& value, double window_fraction) {
  if (k.size() != value.size()) {
    throw std::invalid_argument("fit_rate: k and value lengths differ");
  }
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw std::invalid_argument("fit_rate: window_fraction must be in (0, 1]");
  }

  double k_max = 0.0;
  double v_max = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] > 0.0 && std::isfinite(value[i])) {
      k_max = std::max(k_max, k[i]);
      v_max = std::max(v_max, value[i]);
    }
  }
  const double k_lo = window_fraction * k_max;
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * v_max;

  std::vector<double> xs, ys;
  double k_used_lo = std::numeric_limits<double>::infinity();
  double k_used_hi = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] > 0.0 && k[i] >= k_lo && std::isfinite(value[i]) &&
        value[i] > floor) {
      xs.push_back(std::log(k[i]));
      ys.push_back(std::log(value[i]));
      k_used_lo = std::min(k_used_lo, k[i]);
      k_used_hi = std::max(k_used_hi, k[i]);
    }
  }
  if (xs.size() < 8) {
    throw std::invalid_argument(
        "fit_rate: insufficient points (need >= 8 usable points on the "
        "window)");
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) {
    throw std::invalid_argument(
        "fit_rate: window collapses to a single abscissa");
  }

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  // A constant series fits its own mean exactly.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.k_lo = k_used_lo;
  fit.k_hi = k_used_hi;
  fit.n_points = static_cast<int>(xs.size());
  return fit;
}

}  // namespace ttsa

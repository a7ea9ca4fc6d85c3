#pragma once

#include <vector>

namespace ttsa {

// Least-squares power-law fit value ~ C * k^slope on a log-log tail window.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // log C
  double r_squared = 0.0;
  double k_lo = 0.0;       // window actually used
  double k_hi = 0.0;
  int n_points = 0;
};

// Fits log(value) against log(k) over the tail window
// [window_fraction * max(k), max(k)].  Points with k <= 0 are ignored, and
// values at or below the noise floor (10 * machine epsilon * max value of
// the series) are dropped before fitting.  Throws std::invalid_argument
// ("insufficient points") when fewer than 8 usable points remain, and on
// mismatched inputs or a window fraction outside (0, 1].
SlopeFit fit_rate(const std::vector<double>& k,
                  const std::vector<double>& value,
                  double window_fraction = 0.1);

}  // namespace ttsa

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/oracle.hpp"
#include "ttsa/rng.hpp"
#include "ttsa/schedule.hpp"

namespace ttsa {

// What to record during a run and how densely.
struct MetricsConfig {
  int record_points = 2048;     // target number of recorded iterations
  bool log_spaced = false;      // geometric recording grid (plus k = 0)
  bool store_x_iterates = false;
  bool store_y_iterates = false;
  double divergence_cap = 1e12; // abort when any |coordinate| exceeds this
  long call_budget = 0;         // > 0: stop once oracle calls reach the budget
};

// One recorded iteration.  Metrics that are unavailable (no ground truth, or
// not requested) are NaN; the CSV writer emits them as empty cells.
struct TraceRow {
  long k = 0;
  long calls = 0;         // cumulative oracle sample draws at this point
  double delta_x = 0.0;   // ||x^k - x*||^2
  double delta_y = 0.0;   // ||y^k - y*(x^{k-1})||^2  (x^{-1} := x^0)
  double opt_gap = 0.0;   // l(x^k) - l(x*)
  double near_stat = 0.0; // ||x_hat(x^k) - x^k||^2 (filled by a post-pass)
};

struct RunTrace {
  std::string problem_id;
  std::string regime;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
  std::vector<Vec> x_iterates;  // aligned with rows when stored
  std::vector<Vec> y_iterates;  // aligned with rows when stored
  Vec x_final, y_final;
  long k_end = 0;        // iteration count actually executed
  long total_calls = 0;  // total oracle sample draws
};

// Two-timescale loop: per iteration k,
//   y^{k+1} = y^k - beta_k * h_g       with h_g drawn at (x^k, y^k),
//   x^{k+1} = P_X(x^k - alpha_k * h_f) with h_f the truncated inverse-series
//                                      hypergradient drawn at (x^k, y^{k+1}).
// The inner update is computed first and the outer estimator sees the fresh
// inner iterate; this ordering is part of the convergence guarantees.
//
// x0 is projected onto X if infeasible.  Metrics are recorded on the
// configured grid, always including k = 0 and the final iteration.  Throws
// std::runtime_error with diagnostics if an iterate exceeds the divergence
// cap or turns non-finite.
RunTrace ttsa_run(const StochasticBilevelOracle& oracle,
                  const StepSchedule& schedule, Vec x0, Vec y0, long k_max,
                  const MetricsConfig& metrics, RngStream& rng,
                  const ExactOracle* exact = nullptr);

// Double-loop baseline configuration: at outer step t, run ceil(sqrt(t+1))
// inner SGD steps with step d_beta/(j+2) (j the inner index from 0), then one
// projected outer step with d_alpha/(1+t)^{1/2} using the same hypergradient
// estimator at fixed truncation.
struct BsaConfig {
  double d_alpha = 1.0;
  double d_beta = 1.0;
  int tmax = 8;
  double c_h = 1.0;
};

RunTrace bsa_run(const StochasticBilevelOracle& oracle, Vec x0, Vec y0,
                 long outer_steps, const BsaConfig& cfg,
                 const MetricsConfig& metrics, RngStream& rng,
                 const ExactOracle* exact = nullptr);

// Inner-step count of the baseline at outer step t (exposed for tests).
long bsa_inner_steps(long t);

}  // namespace ttsa

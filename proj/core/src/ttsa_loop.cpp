#include "ttsa/ttsa_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ttsa/hypergrad.hpp"

namespace ttsa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<long> recording_grid(long k_max, const MetricsConfig& m) {
  std::vector<long> grid;
  const int points = std::max(1, m.record_points);
  if (m.log_spaced) {
    grid.push_back(0);
    const double ratio =
        std::pow(static_cast<double>(std::max<long>(k_max, 1)),
                 1.0 / std::max(1, points - 1));
    double k = 1.0;
    while (static_cast<long>(k) < k_max) {
      grid.push_back(static_cast<long>(k));
      k = std::max(k + 1.0, k * ratio);
    }
  } else {
    const long stride = std::max<long>(1, k_max / points);
    for (long k = 0; k < k_max; k += stride) grid.push_back(k);
  }
  grid.push_back(k_max);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void check_divergence(const Vec& x, const Vec& y, long k, double cap,
                      const char* who) {
  const bool bad = !x.allFinite() || !y.allFinite() ||
                   x.lpNorm<Eigen::Infinity>() > cap ||
                   y.lpNorm<Eigen::Infinity>() > cap;
  if (bad) {
    std::ostringstream os;
    os << who << ": divergence at k=" << k
       << " (|x|_inf=" << x.lpNorm<Eigen::Infinity>()
       << ", |y|_inf=" << y.lpNorm<Eigen::Infinity>() << ", cap=" << cap
       << "); check the step-size configuration";
    throw std::runtime_error(os.str());
  }
}

struct GroundTruth {
  const ExactOracle* exact = nullptr;
  bool has_x_star = false;
  Vec x_star;
  double ell_star = 0.0;
};

GroundTruth ground_truth(const ExactOracle* exact) {
  GroundTruth gt;
  gt.exact = exact;
  if (exact != nullptr && exact->has_x_star()) {
    gt.has_x_star = true;
    gt.x_star = exact->x_star();
    gt.ell_star = exact->ell(gt.x_star);
  }
  return gt;
}

TraceRow make_row(long k, long calls, const Vec& x, const Vec& y,
                  const Vec& x_prev, const GroundTruth& gt) {
  TraceRow row;
  row.k = k;
  row.calls = calls;
  row.delta_x = gt.has_x_star ? (x - gt.x_star).squaredNorm() : kNaN;
  row.delta_y = (gt.exact != nullptr)
                    ? (y - gt.exact->y_star(x_prev)).squaredNorm()
                    : kNaN;
  row.opt_gap = gt.has_x_star ? gt.exact->ell(x) - gt.ell_star : kNaN;
  row.near_stat = kNaN;
  return row;
}

void store_iterates(RunTrace& trace, const MetricsConfig& m, const Vec& x,
                    const Vec& y) {
  if (m.store_x_iterates) trace.x_iterates.push_back(x);
  if (m.store_y_iterates) trace.y_iterates.push_back(y);
}

}  // namespace

RunTrace ttsa_run(const StochasticBilevelOracle& oracle,
                  const StepSchedule& schedule, Vec x0, Vec y0, long k_max,
                  const MetricsConfig& metrics, RngStream& rng,
                  const ExactOracle* exact) {
  if (k_max < 1) throw std::invalid_argument("ttsa_run: k_max must be >= 1");
  require_size(x0, oracle.dim_x(), "ttsa_run: x0");
  require_size(y0, oracle.dim_y(), "ttsa_run: y0");

  const Projection& project = oracle.projection();
  Vec x = project(std::move(x0));
  Vec y = std::move(y0);
  Vec x_prev = x;  // convention: x^{-1} = x^0

  const GroundTruth gt = ground_truth(exact);
  const std::vector<long> grid = recording_grid(k_max, metrics);
  std::size_t gi = 0;

  RunTrace trace;
  trace.regime = regime_name(schedule.regime);
  long calls = 0;
  long k = 0;
  for (; k <= k_max; ++k) {
    if (gi < grid.size() && grid[gi] == k) {
      trace.rows.push_back(make_row(k, calls, x, y, x_prev, gt));
      store_iterates(trace, metrics, x, y);
      ++gi;
    }
    if (k == k_max) break;
    if (metrics.call_budget > 0 && calls >= metrics.call_budget) break;

    const double beta = schedule.beta(k);
    Vec y_next = y - beta * oracle.sample_inner_grad(x, y, rng);
    ++calls;

    const HypergradSample hf = neumann_hypergradient(
        oracle, x, y_next, schedule.tmax(k), schedule.c_h, rng);
    calls += hf.draws;

    x_prev = x;
    x = project(x - schedule.alpha(k) * hf.value);
    y = std::move(y_next);
    check_divergence(x, y, k + 1, metrics.divergence_cap, "ttsa_run");
  }
  // Budget stop between grid points: record the final state once.
  if (trace.rows.empty() || trace.rows.back().k != k) {
    trace.rows.push_back(make_row(k, calls, x, y, x_prev, gt));
    store_iterates(trace, metrics, x, y);
  }
  trace.x_final = std::move(x);
  trace.y_final = std::move(y);
  trace.k_end = k;
  trace.total_calls = calls;
  return trace;
}

long bsa_inner_steps(long t) {
  if (t < 0) throw std::invalid_argument("bsa_inner_steps: t must be >= 0");
  return static_cast<long>(
      std::ceil(std::sqrt(static_cast<double>(t) + 1.0)));
}

RunTrace bsa_run(const StochasticBilevelOracle& oracle, Vec x0, Vec y0,
                 long outer_steps, const BsaConfig& cfg,
                 const MetricsConfig& metrics, RngStream& rng,
                 const ExactOracle* exact) {
  if (outer_steps < 1) {
    throw std::invalid_argument("bsa_run: outer_steps must be >= 1");
  }
  if (cfg.d_alpha <= 0 || cfg.d_beta <= 0) {
    throw std::invalid_argument("bsa_run: step prefactors must be > 0");
  }
  require_size(x0, oracle.dim_x(), "bsa_run: x0");
  require_size(y0, oracle.dim_y(), "bsa_run: y0");

  const Projection& project = oracle.projection();
  Vec x = project(std::move(x0));
  Vec y = std::move(y0);
  Vec x_prev = x;

  const GroundTruth gt = ground_truth(exact);
  const std::vector<long> grid = recording_grid(outer_steps, metrics);
  std::size_t gi = 0;

  RunTrace trace;
  trace.regime = "bsa";
  long calls = 0;
  long t = 0;
  for (; t <= outer_steps; ++t) {
    if (gi < grid.size() && grid[gi] == t) {
      trace.rows.push_back(make_row(t, calls, x, y, x_prev, gt));
      store_iterates(trace, metrics, x, y);
      ++gi;
    }
    if (t == outer_steps) break;
    if (metrics.call_budget > 0 && calls >= metrics.call_budget) break;

    const long inner = bsa_inner_steps(t);
    for (long j = 0; j < inner; ++j) {
      const double beta = cfg.d_beta / (static_cast<double>(j) + 2.0);
      y -= beta * oracle.sample_inner_grad(x, y, rng);
      ++calls;
    }
    const HypergradSample hf =
        neumann_hypergradient(oracle, x, y, cfg.tmax, cfg.c_h, rng);
    calls += hf.draws;

    const double alpha = cfg.d_alpha / std::sqrt(1.0 + static_cast<double>(t));
    x_prev = x;
    x = project(x - alpha * hf.value);
    check_divergence(x, y, t + 1, metrics.divergence_cap, "bsa_run");
  }
  if (trace.rows.empty() || trace.rows.back().k != t) {
    trace.rows.push_back(make_row(t, calls, x, y, x_prev, gt));
    store_iterates(trace, metrics, x, y);
  }
  trace.x_final = std::move(x);
  trace.y_final = std::move(y);
  trace.k_end = t;
  trace.total_calls = calls;
  return trace;
}

}  // namespace ttsa

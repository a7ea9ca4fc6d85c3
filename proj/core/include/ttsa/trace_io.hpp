#pragma once

#include <string>
#include <vector>

#include "ttsa/nac.hpp"
#include "ttsa/ttsa_loop.hpp"

namespace ttsa {

// Version stamp emitted into every CSV (leading "# format_version=N" comment
// line) and JSON ("format_version" key).
inline constexpr int kTraceFormatVersion = 1;

// Solver trace CSV: header k,delta_x,delta_y,opt_gap,near_stat; a metric
// that is unavailable (NaN) leaves its cell empty.  Deterministic output:
// no timestamps, "." decimal point, 17-significant-digit round-trip floats.
std::string trace_to_csv(const RunTrace& trace);
void write_trace_csv(const RunTrace& trace, const std::string& path);

// Pointwise mean and standard error over replications that share one
// recording grid (same k at every row; enforced).
struct AggregateTrace {
  std::vector<long> k;
  std::vector<double> calls_mean;
  std::vector<double> delta_x_mean, delta_x_stderr;
  std::vector<double> delta_y_mean, delta_y_stderr;
  std::vector<double> opt_gap_mean, opt_gap_stderr;
  std::vector<double> near_stat_mean, near_stat_stderr;
  int n_replications = 0;
};
AggregateTrace aggregate_traces(const std::vector<RunTrace>& traces);

// Aggregate CSV: k,calls_mean,<metric>_mean,<metric>_stderr per metric, with
// empty cells where no replication recorded the metric.
std::string aggregate_to_csv(const AggregateTrace& agg);
void write_aggregate_csv(const AggregateTrace& agg, const std::string& path);

// Run summary JSON: seed, regime, problem id, iteration/call counts, final
// recorded metrics (null when unavailable).  No timestamps, so reruns are
// byte-identical.
std::string trace_summary_json(const RunTrace& trace);
void write_trace_summary(const RunTrace& trace, const std::string& path);

// Actor-critic trace CSV: header k,opt,delta_q,tv_step.
std::string nac_trace_to_csv(const NacTrace& trace);
void write_nac_trace_csv(const NacTrace& trace, const std::string& path);

}  // namespace ttsa

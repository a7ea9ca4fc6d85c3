#include "ttsa/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ttsa {

namespace {

// Round-trip float formatting, independent of the global locale state the
// host process might carry (the library itself never calls setlocale).
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Empty cell for an unavailable metric.
std::string cell(double v) { return std::isnan(v) ? std::string() : fmt(v); }

void write_file(const std::string& text, const std::string& path,
                const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(std::string(what) + ": cannot open " + path);
  }
  out << text;
  if (!out) {
    throw std::runtime_error(std::string(what) + ": write failed for " + path);
  }
}

struct MomentCell {
  double mean = std::nan("");
  double stderr_ = std::nan("");
};

// Mean and standard error over the finite entries; all-NaN stays NaN.
MomentCell moments(const std::vector<double>& values) {
  MomentCell out;
  double sum = 0.0;
  long n = 0;
  for (double v : values) {
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) return out;
  out.mean = sum / static_cast<double>(n);
  if (n == 1) {
    out.stderr_ = 0.0;
    return out;
  }
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) {
      const double d = v - out.mean;
      ss += d * d;
    }
  }
  out.stderr_ = std::sqrt(ss / static_cast<double>(n - 1)) /
                std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

std::string trace_to_csv(const RunTrace& trace) {
  std::string out = "# format_version=" + std::to_string(kTraceFormatVersion) +
                    "\nk,delta_x,delta_y,opt_gap,near_stat\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += cell(row.delta_x);
    out += ',';
    out += cell(row.delta_y);
    out += ',';
    out += cell(row.opt_gap);
    out += ',';
    out += cell(row.near_stat);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  write_file(trace_to_csv(trace), path, "write_trace_csv");
}

AggregateTrace aggregate_traces(const std::vector<RunTrace>& traces) {
  if (traces.empty()) {
    throw std::invalid_argument("aggregate_traces: no traces");
  }
  const std::size_t rows = traces.front().rows.size();
  for (const RunTrace& t : traces) {
    if (t.rows.size() != rows) {
      throw std::invalid_argument(
          "aggregate_traces: replications disagree on the recording grid");
    }
  }

  AggregateTrace agg;
  agg.n_replications = static_cast<int>(traces.size());
  agg.k.resize(rows);
  agg.calls_mean.resize(rows);
  agg.delta_x_mean.resize(rows);
  agg.delta_x_stderr.resize(rows);
  agg.delta_y_mean.resize(rows);
  agg.delta_y_stderr.resize(rows);
  agg.opt_gap_mean.resize(rows);
  agg.opt_gap_stderr.resize(rows);
  agg.near_stat_mean.resize(rows);
  agg.near_stat_stderr.resize(rows);

  std::vector<double> scratch(traces.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const long k = traces.front().rows[i].k;
    for (const RunTrace& t : traces) {
      if (t.rows[i].k != k) {
        throw std::invalid_argument(
            "aggregate_traces: replications disagree on the recording grid");
      }
    }
    agg.k[i] = k;

    double calls = 0.0;
    for (const RunTrace& t : traces) {
      calls += static_cast<double>(t.rows[i].calls);
    }
    agg.calls_mean[i] = calls / static_cast<double>(traces.size());

    auto fill = [&](auto member, std::vector<double>& mean_out,
                    std::vector<double>& stderr_out) {
      for (std::size_t r = 0; r < traces.size(); ++r) {
        scratch[r] = traces[r].rows[i].*member;
      }
      const MomentCell m = moments(scratch);
      mean_out[i] = m.mean;
      stderr_out[i] = m.stderr_;
    };
    fill(&TraceRow::delta_x, agg.delta_x_mean, agg.delta_x_stderr);
    fill(&TraceRow::delta_y, agg.delta_y_mean, agg.delta_y_stderr);
    fill(&TraceRow::opt_gap, agg.opt_gap_mean, agg.opt_gap_stderr);
    fill(&TraceRow::near_stat, agg.near_stat_mean, agg.near_stat_stderr);
  }
  return agg;
}

std::string aggregate_to_csv(const AggregateTrace& agg) {
  std::string out =
      "# format_version=" + std::to_string(kTraceFormatVersion) +
      "\nk,calls_mean,delta_x_mean,delta_x_stderr,delta_y_mean,delta_y_stderr,"
      "opt_gap_mean,opt_gap_stderr,near_stat_mean,near_stat_stderr\n";
  for (std::size_t i = 0; i < agg.k.size(); ++i) {
    out += std::to_string(agg.k[i]);
    out += ',';
    out += cell(agg.calls_mean[i]);
    out += ',';
    out += cell(agg.delta_x_mean[i]);
    out += ',';
    out += cell(agg.delta_x_stderr[i]);
    out += ',';
    out += cell(agg.delta_y_mean[i]);
    out += ',';
    out += cell(agg.delta_y_stderr[i]);
    out += ',';
    out += cell(agg.opt_gap_mean[i]);
    out += ',';
    out += cell(agg.opt_gap_stderr[i]);
    out += ',';
    out += cell(agg.near_stat_mean[i]);
    out += ',';
    out += cell(agg.near_stat_stderr[i]);
    out += '\n';
  }
  return out;
}

void write_aggregate_csv(const AggregateTrace& agg, const std::string& path) {
  write_file(aggregate_to_csv(agg), path, "write_aggregate_csv");
}

std::string trace_summary_json(const RunTrace& trace) {
  nlohmann::json j;
  j["format_version"] = kTraceFormatVersion;
  j["problem_id"] = trace.problem_id;
  j["regime"] = trace.regime;
  j["seed"] = trace.seed;
  j["k_end"] = trace.k_end;
  j["total_calls"] = trace.total_calls;
  nlohmann::json final_metrics;
  auto set = [&](const char* key, double v) {
    if (std::isnan(v)) {
      final_metrics[key] = nullptr;
    } else {
      final_metrics[key] = v;
    }
  };
  if (!trace.rows.empty()) {
    const TraceRow& last = trace.rows.back();
    set("delta_x", last.delta_x);
    set("delta_y", last.delta_y);
    set("opt_gap", last.opt_gap);
    set("near_stat", last.near_stat);
  }
  j["final"] = final_metrics;
  return j.dump(2) + "\n";
}

void write_trace_summary(const RunTrace& trace, const std::string& path) {
  write_file(trace_summary_json(trace), path, "write_trace_summary");
}

std::string nac_trace_to_csv(const NacTrace& trace) {
  std::string out = "# format_version=" + std::to_string(kTraceFormatVersion) +
                    "\nk,opt,delta_q,tv_step\n";
  for (const NacRow& row : trace.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += cell(row.opt);
    out += ',';
    out += cell(row.delta_q);
    out += ',';
    out += cell(row.tv_step);
    out += '\n';
  }
  return out;
}

void write_nac_trace_csv(const NacTrace& trace, const std::string& path) {
  write_file(nac_trace_to_csv(trace), path, "write_nac_trace_csv");
}

}  // namespace ttsa

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanc/metrics.hpp"
#include "lanc/sim.hpp"

namespace lanc::cli {

/// Parses flat `key = value` lines; `#` starts a comment. Missing keys keep
/// their defaults. Throws ParseError (with line number) for malformed lines
/// or unknown keys and ValidationError naming the field for bad values.
sim::SimConfig parse_config(std::istream& in);
sim::SimConfig parse_config_file(const std::filesystem::path& path);

/// Sets one config key from its textual value; same errors as parse_config.
void apply_setting(sim::SimConfig& config, std::string_view key, std::string_view value);

/// Inverse of apply_setting, used for echoing configs into reports.
std::string setting_value(const sim::SimConfig& config, std::string_view key);

/// Every key accepted by parse_config, in canonical order.
const std::vector<std::string>& config_keys();

// --- tables ---------------------------------------------------------------

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_temporal_csv(std::ostream& out, const std::vector<metrics::TemporalSlot>& series);
std::vector<metrics::TemporalSlot> read_temporal_csv(std::istream& in);

struct HistogramRow {
  std::uint32_t peer_id = 0;
  long asn = 0;
  std::uint64_t uploaded_blocks = 0;
  /// -1 for peers that never finished.
  double finish_time = -1;
  friend bool operator==(const HistogramRow&, const HistogramRow&) = default;
};

/// One row per non-server peer.
std::vector<HistogramRow> histogram_rows(const sim::TransferTrace& trace);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows);
std::vector<HistogramRow> read_histogram_csv(std::istream& in);

void write_trace_csv(std::ostream& out, const std::vector<sim::TransferRecord>& transfers);
std::vector<sim::TransferRecord> read_trace_csv(std::istream& in);

/// Report document: config echo, seed and scalar metrics.
std::string report_json(const sim::SimConfig& config, const metrics::MetricsReport& report);

// --- commands -------------------------------------------------------------

/// Runs one simulation and writes report.json, temporal.csv, histogram.csv
/// and trace.csv into `out_dir`. Throws on any library error.
void run_command(const sim::SimConfig& config, const std::filesystem::path& out_dir);

struct ExperimentPlan {
  sim::SimConfig base;
  std::string param;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
  /// Policies compared at every sweep point; empty means the base policy only.
  std::vector<std::string> policies;
  std::filesystem::path out_dir;

  /// Throws ValidationError for an unknown parameter or empty seed list.
  void validate() const;
};

struct AggregateRow {
  std::string param;
  std::string value;
  std::string policy;
  std::string metric;
  double mean = 0;
  double stddev = 0;
  std::size_t runs = 0;
};

/// Scalar metrics emitted per run and aggregated by sweeps. Metrics absent
/// from a run (avg_dt/max_dt with nobody finished) are left out of its row
/// and the aggregate's `runs` counts only runs that reported them.
const std::vector<std::string>& sweep_metrics();
std::optional<double> metric_value(const metrics::MetricsReport& report, std::string_view metric);

/// Mean and sample standard deviation (0 for a single run).
std::pair<double, double> mean_stddev(const std::vector<double>& xs);

/// Runs every (value, policy, seed) point. Per-run rows go to runs.csv as
/// they finish; aggregate.csv holds one row per (value, policy, metric).
std::vector<AggregateRow> sweep_command(const ExperimentPlan& plan);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

struct BenchResult {
  double bytes_per_second = 0;
  double mults_per_byte = 0;
  std::uint64_t blocks_encoded = 0;
};

/// Encodes from a random buffer of n blocks of k bytes, m per output block,
/// for about `seconds` of wall time.
BenchResult bench_command(std::size_t k, std::size_t n, std::size_t m, double seconds);

}  // namespace lanc::cli

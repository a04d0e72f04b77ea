#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lanc/trace.hpp"

namespace lanc::metrics {

using sim::TransferTrace;

struct DistributionTimes {
  double avg_dt = 0;
  double max_dt = 0;
  std::size_t unfinished_count = 0;
};

struct TemporalSlot {
  std::size_t slot = 0;
  std::uint64_t transfers = 0;
  std::uint64_t weighted_transfers = 0;
};

struct UploadHistogram {
  std::vector<std::uint64_t> counts;  // indexed by peer id
  /// Coefficient of variation over non-server peers.
  double cov = 0;
};

struct MetricsReport {
  double idtr = 0;
  std::optional<double> avg_dt;
  std::optional<double> max_dt;
  std::size_t unfinished_count = 0;
  double unfinished_fraction = 0;
  std::uint64_t total_interdomain_block_hops = 0;
  std::uint64_t dependent_block_count = 0;
  std::uint64_t total_transfers = 0;
  std::vector<TemporalSlot> temporal_series;
  UploadHistogram upload_histogram;
};

/// Distinct ASes holding at least one peer (server included).
std::size_t populated_as_count(const TransferTrace& trace);

/// Hop-weighted inter-domain transfers over n * (populated ASes - 1).
/// 1.0 when both are zero; throws DegenerateTopology when only the
/// denominator is.
double idtr(const TransferTrace& trace, std::size_t blocks);

/// DT = finish - join over finished non-server peers. Throws NoFinishedPeers
/// when none finished.
DistributionTimes distribution_times(const TransferTrace& trace);
std::size_t unfinished_count(const TransferTrace& trace);

/// Inter-domain transfers binned by completion time.
std::vector<TemporalSlot> temporal_series(const TransferTrace& trace, double bin_width);

UploadHistogram upload_histogram(const TransferTrace& trace);

MetricsReport compute_report(const TransferTrace& trace, double bin_width = 1.0);

}  // namespace lanc::metrics

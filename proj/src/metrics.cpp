#include "lanc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lanc/error.hpp"

namespace lanc::metrics {

std::size_t populated_as_count(const TransferTrace& trace) {
  std::set<net::AsIndex> ases;
  for (const auto& p : trace.peers) ases.insert(p.as_index);
  return ases.size();
}

double idtr(const TransferTrace& trace, std::size_t blocks) {
  std::uint64_t hops = 0;
  for (const auto& t : trace.transfers) hops += static_cast<std::uint64_t>(t.hops);
  std::size_t populated = populated_as_count(trace);
  std::uint64_t minimum = populated > 0 ? blocks * (populated - 1) : 0;
  if (minimum == 0) {
    if (hops == 0) return 1.0;
    fail(ErrorCode::DegenerateTopology,
         "inter-domain traffic with a single populated AS");
  }
  return static_cast<double>(hops) / static_cast<double>(minimum);
}

std::size_t unfinished_count(const TransferTrace& trace) {
  std::size_t count = 0;
  for (const auto& p : trace.peers)
    if (!p.server && !p.finish_time) ++count;
  return count;
}

DistributionTimes distribution_times(const TransferTrace& trace) {
  DistributionTimes out;
  double sum = 0;
  std::size_t finished = 0;
  for (const auto& p : trace.peers) {
    if (p.server) continue;
    if (!p.finish_time) {
      ++out.unfinished_count;
      continue;
    }
    double dt = *p.finish_time - p.join_time;
    sum += dt;
    out.max_dt = finished == 0 ? dt : std::max(out.max_dt, dt);
    ++finished;
  }
  if (finished == 0) fail(ErrorCode::NoFinishedPeers, "no peer finished its download");
  out.avg_dt = sum / static_cast<double>(finished);
  return out;
}

std::vector<TemporalSlot> temporal_series(const TransferTrace& trace, double bin_width) {
  if (!(bin_width > 0)) fail(ErrorCode::ValidationError, "bin width must be positive");
  std::vector<TemporalSlot> series;
  for (const auto& t : trace.transfers) {
    auto slot = static_cast<std::size_t>(std::floor(t.time / bin_width));
    if (series.size() <= slot) {
      std::size_t old = series.size();
      series.resize(slot + 1);
      for (std::size_t i = old; i < series.size(); ++i) series[i].slot = i;
    }
    if (t.hops > 0) {
      series[slot].transfers += 1;
      series[slot].weighted_transfers += static_cast<std::uint64_t>(t.hops);
    }
  }
  return series;
}

UploadHistogram upload_histogram(const TransferTrace& trace) {
  UploadHistogram h;
  h.counts.assign(trace.peers.size(), 0);
  for (const auto& t : trace.transfers) ++h.counts[t.src];

  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (const auto& p : trace.peers) {
    if (p.server) continue;
    auto c = static_cast<double>(h.counts[p.id]);
    sum += c;
    sq += c * c;
    ++n;
  }
  if (n > 0 && sum > 0) {
    double mean = sum / static_cast<double>(n);
    double var = std::max(0.0, sq / static_cast<double>(n) - mean * mean);
    h.cov = std::sqrt(var) / mean;
  }
  return h;
}

MetricsReport compute_report(const TransferTrace& trace, double bin_width) {
  MetricsReport r;
  r.idtr = idtr(trace, trace.blocks);
  r.unfinished_count = unfinished_count(trace);
  std::size_t population = 0;
  for (const auto& p : trace.peers) population += p.server ? 0 : 1;
  r.unfinished_fraction =
      population ? static_cast<double>(r.unfinished_count) / static_cast<double>(population) : 0.0;
  if (r.unfinished_count < population) {
    auto dt = distribution_times(trace);
    r.avg_dt = dt.avg_dt;
    r.max_dt = dt.max_dt;
  }
  for (const auto& t : trace.transfers) {
    r.total_interdomain_block_hops += static_cast<std::uint64_t>(t.hops);
    r.dependent_block_count += t.dependent ? 1 : 0;
  }
  r.total_transfers = trace.transfers.size();
  r.temporal_series = temporal_series(trace, bin_width);
  r.upload_histogram = upload_histogram(trace);
  return r;
}

}  // namespace lanc::metrics

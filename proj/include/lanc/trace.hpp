#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lanc/netmodel.hpp"

namespace lanc::sim {

using net::PeerId;

/// One completed block transfer. Cancelled transfers never appear.
struct TransferRecord {
  double request_time = 0;
  double time = 0;
  PeerId src = 0;
  PeerId dst = 0;
  /// AS-level hops between src and dst; 0 for intra-domain.
  int hops = 0;
  /// The block did not raise the receiver's rank.
  bool dependent = false;
};

struct PeerSummary {
  PeerId id = 0;
  long asn = 0;
  net::AsIndex as_index = 0;
  bool server = false;
  double join_time = 0;
  std::optional<double> finish_time;
  std::optional<double> depart_time;
  std::uint64_t uploaded = 0;
  std::uint64_t downloaded = 0;
};

struct TransferTrace {
  std::size_t blocks = 0;
  std::vector<TransferRecord> transfers;
  /// Indexed by peer id; peer 0 is the server.
  std::vector<PeerSummary> peers;
  /// Inter-domain block-hops counted by the engine as transfers completed.
  std::uint64_t online_interdomain_hops = 0;
  /// Finished peers whose decoded file differed from the original.
  std::size_t decode_failures = 0;
};

}  // namespace lanc::sim

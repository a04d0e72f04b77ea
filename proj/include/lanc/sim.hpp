#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lanc/metrics.hpp"
#include "lanc/netmodel.hpp"
#include "lanc/policies.hpp"
#include "lanc/random.hpp"
#include "lanc/trace.hpp"

namespace lanc::sim {

enum class Scenario { Static, A, B, C, D };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);

/// Churn timings. Defaults: ten join batches 10 ts apart, finished peers
/// leave 10 ts after finishing, the server leaves 10 ts after the last batch
/// (B) or after serving 120 blocks (C), and 5% of peers leave every 10 ts up
/// to t = 100 (D).
struct ScenarioParams {
  std::size_t batches = 10;
  double batch_interval = 10;
  double linger = 10;
  double server_linger = 10;
  std::uint64_t server_budget = 120;
  double churn_interval = 10;
  double churn_until = 100;
  double churn_fraction = 0.05;
};

struct SimConfig {
  std::size_t peers = 1000;
  std::size_t blocks = 100;
  std::size_t block_size = 16;
  int avg_degree = 10;
  double intra_fraction = 0.7;
  double deploy_fraction = 1.0;
  bool server_locality = true;
  net::Placement placement = net::Placement::Proportional;
  policy::SchedulingPolicy policy;
  int capacity_up = 3;
  int capacity_down = 3;
  double hetero_fraction = 0.0;
  int hetero_multiplier = 10;
  bool server_high_capacity = false;
  Scenario scenario = Scenario::Static;
  ScenarioParams scenario_params;
  /// "synthetic" (the shipped 37-AS/156-edge graph), "synthetic:ASES:EDGES[:SEED]",
  /// or a path to an edge-list file.
  std::string underlay = "synthetic";
  /// AS label of the server; defaults to the highest-degree AS.
  std::optional<long> server_as;
  std::uint64_t seed = 1;
  double max_time = 1e5;
  /// Recheck slot accounting after every event (slow; for tests).
  bool check_invariants = false;

  /// Throws Error{ConfigError} naming the offending field.
  void validate() const;
};

inline constexpr std::uint64_t kSyntheticUnderlaySeed = 17964;

/// Resolves SimConfig::underlay. Throws IoError / ParseError / ConfigError.
net::UnderlayGraph resolve_underlay(const std::string& source);

/// Uniform on [0.75, 1.25] ts.
double sample_link_delay(Rng& rng);

struct RunResult {
  metrics::MetricsReport report;
  TransferTrace trace;
  /// Total requests issued, including ones later cancelled by departures.
  std::size_t requests_issued = 0;
};

RunResult run(const SimConfig& config);
RunResult run(const SimConfig& config, const net::UnderlayGraph& underlay);

}  // namespace lanc::sim

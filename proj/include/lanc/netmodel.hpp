#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lanc/random.hpp"

namespace lanc::net {

using PeerId = std::uint32_t;
/// Dense AS index into an UnderlayGraph (not the AS label).
using AsIndex = std::uint32_t;

/// Connected, simple, undirected AS graph with all-pairs hop counts.
class UnderlayGraph {
 public:
  /// Edges are given as AS labels. Labels are mapped to dense indices in
  /// ascending label order. Duplicate edges are merged.
  /// Throws ParseError on self-loops, DisconnectedGraph if not connected.
  static UnderlayGraph from_edges(const std::vector<std::pair<long, long>>& labelled_edges);

  std::size_t as_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::pair<AsIndex, AsIndex>>& edges() const { return edges_; }
  int hops(AsIndex a, AsIndex b) const { return hop_[a * as_count() + b]; }
  std::size_t degree(AsIndex a) const { return adjacency_[a].size(); }
  const std::vector<AsIndex>& neighbors(AsIndex a) const { return adjacency_[a]; }
  long label(AsIndex a) const { return labels_[a]; }
  std::optional<AsIndex> index_of(long label) const;
  /// Mean shortest-path hops over ordered pairs of distinct ASes.
  double mean_hops() const;
  /// Highest degree AS; lowest label wins ties.
  AsIndex max_degree_as() const;

 private:
  std::vector<long> labels_;
  std::vector<std::pair<AsIndex, AsIndex>> edges_;
  std::vector<std::vector<AsIndex>> adjacency_;
  std::vector<int> hop_;
};

/// Line-oriented "u v" edge list; '#' starts a comment line.
UnderlayGraph load_underlay(std::istream& in);
/// Throws IoError naming the path if it cannot be opened.
UnderlayGraph load_underlay_file(const std::string& path);
void write_underlay(std::ostream& out, const UnderlayGraph& g);

/// Random spanning tree plus uniformly drawn extra edges; labels 0..as_count-1.
UnderlayGraph generate_underlay(std::size_t as_count, std::size_t edge_count, Rng& rng);

enum class Placement { Proportional, Uniform };

/// Independent draw of an AS per peer, weighted by AS degree or uniform.
std::vector<AsIndex> assign_peers(const UnderlayGraph& underlay, std::size_t peer_count,
                                  Placement mode, Rng& rng);

/// Symmetric neighbor graph over peers annotated with their AS.
class OverlayGraph {
 public:
  OverlayGraph() = default;
  OverlayGraph(std::vector<AsIndex> asn_of, std::vector<bool> locality_aware);

  std::size_t peer_count() const { return asn_of_.size(); }
  AsIndex asn_of(PeerId p) const { return asn_of_[p]; }
  const std::vector<AsIndex>& asn_of() const { return asn_of_; }
  bool locality_aware(PeerId p) const { return aware_[p]; }
  const std::vector<PeerId>& neighbors(PeerId p) const { return adjacency_[p]; }

  bool has_edge(PeerId a, PeerId b) const;
  /// Returns false (and changes nothing) for self-loops and existing edges.
  bool add_edge(PeerId a, PeerId b);
  void isolate(PeerId p);

  std::size_t edge_count() const;
  double mean_degree() const;
  /// Fraction of edges whose endpoints share an AS.
  double intra_fraction() const;
  /// True when every peer is reachable from root.
  bool all_reachable_from(PeerId root) const;

 private:
  std::vector<AsIndex> asn_of_;
  std::vector<bool> aware_;
  std::vector<std::vector<PeerId>> adjacency_;
};

/// Locality-aware peers draw each initiated link inside their own AS with
/// probability `intra_fraction` (external when the AS is exhausted) and
/// uniformly over all peers otherwise; oblivious peers always draw
/// uniformly. Peers initiate round(N * avg_degree / 2) links in total.
/// Throws InfeasibleDegree when avg_degree >= peer count.
OverlayGraph build_overlay(const std::vector<AsIndex>& asn_of, int avg_degree,
                           double intra_fraction, const std::vector<bool>& locality_aware,
                           Rng& rng);

/// As above with round(deploy_fraction * N) locality-aware peers chosen at random.
OverlayGraph build_overlay(const std::vector<AsIndex>& asn_of, int avg_degree,
                           double intra_fraction, double deploy_fraction, Rng& rng);

/// Connects `joiner` to up to `degree` of the `present` peers: round(degree *
/// intra_fraction) inside its AS when locality-aware (the shortfall spills to
/// other ASes), uniformly otherwise. Returns the new neighbors.
std::vector<PeerId> connect_joiner(OverlayGraph& overlay, PeerId joiner,
                                   std::span<const PeerId> present, int degree,
                                   double intra_fraction, Rng& rng);

/// 0 within an AS, otherwise the AS-level shortest path length.
int peer_distance(PeerId i, PeerId j, const OverlayGraph& overlay,
                  const UnderlayGraph& underlay);

/// Debug export: "peers N", N lines "peer_id as_label", then "u v" edges.
void write_overlay(std::ostream& out, const OverlayGraph& overlay,
                   const UnderlayGraph& underlay);
OverlayGraph read_overlay(std::istream& in, const UnderlayGraph& underlay);

}  // namespace lanc::net

#include "lanc/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "lanc/error.hpp"

namespace lanc::net {

namespace {

bool blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<int> bfs_hops(const std::vector<std::vector<AsIndex>>& adj, AsIndex src) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<AsIndex> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

}  // namespace

UnderlayGraph UnderlayGraph::from_edges(const std::vector<std::pair<long, long>>& labelled) {
  std::set<long> label_set;
  for (auto [u, v] : labelled) {
    if (u == v) fail(ErrorCode::ParseError, "self-loop on AS " + std::to_string(u));
    label_set.insert(u);
    label_set.insert(v);
  }
  if (label_set.empty()) fail(ErrorCode::ParseError, "underlay has no edges");

  UnderlayGraph g;
  g.labels_.assign(label_set.begin(), label_set.end());
  std::map<long, AsIndex> index;
  for (AsIndex i = 0; i < g.labels_.size(); ++i) index[g.labels_[i]] = i;

  std::set<std::pair<AsIndex, AsIndex>> seen;
  g.adjacency_.resize(g.labels_.size());
  for (auto [u, v] : labelled) {
    AsIndex a = index[u], b = index[v];
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    g.edges_.push_back({a, b});
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }

  std::size_t n = g.labels_.size();
  g.hop_.resize(n * n);
  for (AsIndex s = 0; s < n; ++s) {
    auto d = bfs_hops(g.adjacency_, s);
    for (AsIndex t = 0; t < n; ++t) {
      if (d[t] < 0) {
        fail(ErrorCode::DisconnectedGraph, "AS " + std::to_string(g.labels_[t]) +
                                               " unreachable from AS " +
                                               std::to_string(g.labels_[s]));
      }
      g.hop_[s * n + t] = d[t];
    }
  }
  return g;
}

std::optional<AsIndex> UnderlayGraph::index_of(long label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<AsIndex>(it - labels_.begin());
}

double UnderlayGraph::mean_hops() const {
  std::size_t n = as_count();
  if (n < 2) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sum += hop_[i * n + j];
  return sum / static_cast<double>(n * (n - 1));
}

AsIndex UnderlayGraph::max_degree_as() const {
  AsIndex best = 0;
  for (AsIndex a = 1; a < as_count(); ++a)
    if (degree(a) > degree(best)) best = a;
  return best;
}

UnderlayGraph load_underlay(std::istream& in) {
  std::vector<std::pair<long, long>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ls(line);
    long u = 0, v = 0;
    std::string rest;
    if (!(ls >> u >> v) || (ls >> rest)) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": expected \"u v\", got \"" + line + "\"");
    }
    if (u == v) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": self-loop on AS " + std::to_string(u));
    }
    edges.emplace_back(u, v);
  }
  return UnderlayGraph::from_edges(edges);
}

UnderlayGraph load_underlay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open underlay file " + path);
  return load_underlay(in);
}

void write_underlay(std::ostream& out, const UnderlayGraph& g) {
  out << "# AS-level underlay: " << g.as_count() << " ASes, " << g.edge_count() << " edges\n";
  for (auto [a, b] : g.edges()) out << g.label(a) << ' ' << g.label(b) << '\n';
}

UnderlayGraph generate_underlay(std::size_t as_count, std::size_t edge_count, Rng& rng) {
  if (as_count < 2) fail(ErrorCode::InfeasibleParameters, "need at least 2 ASes");
  std::size_t max_edges = as_count * (as_count - 1) / 2;
  if (edge_count + 1 < as_count || edge_count > max_edges) {
    fail(ErrorCode::InfeasibleParameters,
         std::to_string(edge_count) + " edges cannot form a connected simple graph on " +
             std::to_string(as_count) + " ASes");
  }
  std::vector<long> order(as_count);
  for (std::size_t i = 0; i < as_count; ++i) order[i] = static_cast<long>(i);
  rng.shuffle(order.begin(), order.end());

  std::set<std::pair<long, long>> present;
  std::vector<std::pair<long, long>> edges;
  auto add = [&](long u, long v) {
    if (u > v) std::swap(u, v);
    if (u == v || !present.insert({u, v}).second) return false;
    edges.emplace_back(u, v);
    return true;
  };
  for (std::size_t i = 1; i < as_count; ++i) add(order[i], order[rng.below(i)]);
  while (edges.size() < edge_count) {
    add(static_cast<long>(rng.below(as_count)), static_cast<long>(rng.below(as_count)));
  }
  return UnderlayGraph::from_edges(edges);
}

std::vector<AsIndex> assign_peers(const UnderlayGraph& underlay, std::size_t peer_count,
                                  Placement mode, Rng& rng) {
  std::size_t n = underlay.as_count();
  std::vector<double> cumulative(n);
  double total = 0;
  for (AsIndex a = 0; a < n; ++a) {
    total += mode == Placement::Proportional ? static_cast<double>(underlay.degree(a)) : 1.0;
    cumulative[a] = total;
  }
  std::vector<AsIndex> out(peer_count);
  for (auto& as : out) {
    double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    as = static_cast<AsIndex>(std::min<std::size_t>(it - cumulative.begin(), n - 1));
  }
  return out;
}

OverlayGraph::OverlayGraph(std::vector<AsIndex> asn_of, std::vector<bool> locality_aware)
    : asn_of_(std::move(asn_of)), aware_(std::move(locality_aware)),
      adjacency_(asn_of_.size()) {
  aware_.resize(asn_of_.size(), false);
}

bool OverlayGraph::has_edge(PeerId a, PeerId b) const {
  const auto& na = adjacency_[a].size() <= adjacency_[b].size() ? adjacency_[a] : adjacency_[b];
  PeerId other = &na == &adjacency_[a] ? b : a;
  return std::find(na.begin(), na.end(), other) != na.end();
}

bool OverlayGraph::add_edge(PeerId a, PeerId b) {
  if (a == b || has_edge(a, b)) return false;
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
  return true;
}

void OverlayGraph::isolate(PeerId p) {
  for (auto q : adjacency_[p]) {
    auto& nq = adjacency_[q];
    nq.erase(std::find(nq.begin(), nq.end(), p));
  }
  adjacency_[p].clear();
}

std::size_t OverlayGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : adjacency_) twice += n.size();
  return twice / 2;
}

double OverlayGraph::mean_degree() const {
  if (adjacency_.empty()) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(adjacency_.size());
}

double OverlayGraph::intra_fraction() const {
  std::size_t intra = 0, total = 0;
  for (PeerId p = 0; p < adjacency_.size(); ++p) {
    for (auto q : adjacency_[p]) {
      if (q < p) continue;
      ++total;
      intra += asn_of_[p] == asn_of_[q] ? 1 : 0;
    }
  }
  return total ? static_cast<double>(intra) / static_cast<double>(total) : 0.0;
}

bool OverlayGraph::all_reachable_from(PeerId root) const {
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<PeerId> stack{root};
  seen[root] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : adjacency_[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == adjacency_.size();
}

namespace {

// Uniform pick from `pool` satisfying `ok`; rejection first, exhaustive scan after.
template <typename Ok>
std::optional<PeerId> pick_from(std::span<const PeerId> pool, Ok ok, Rng& rng) {
  if (pool.empty()) return std::nullopt;
  for (int attempt = 0; attempt < 32; ++attempt) {
    PeerId c = pool[rng.below(pool.size())];
    if (ok(c)) return c;
  }
  std::vector<PeerId> valid;
  for (auto c : pool)
    if (ok(c)) valid.push_back(c);
  if (valid.empty()) return std::nullopt;
  return valid[rng.below(valid.size())];
}

}  // namespace

OverlayGraph build_overlay(const std::vector<AsIndex>& asn_of, int avg_degree,
                           double intra_fraction, const std::vector<bool>& locality_aware,
                           Rng& rng) {
  std::size_t n = asn_of.size();
  if (avg_degree < 1 || static_cast<std::size_t>(avg_degree) >= n) {
    fail(ErrorCode::InfeasibleDegree, "average degree " + std::to_string(avg_degree) +
                                          " needs at least " + std::to_string(avg_degree + 1) +
                                          " peers, have " + std::to_string(n));
  }
  if (intra_fraction < 0 || intra_fraction > 1) {
    fail(ErrorCode::InfeasibleParameters, "intra-domain fraction must lie in [0, 1]");
  }
  OverlayGraph g(asn_of, locality_aware);

  std::map<AsIndex, std::vector<PeerId>> members;
  std::vector<PeerId> everyone(n);
  for (PeerId p = 0; p < n; ++p) {
    members[asn_of[p]].push_back(p);
    everyone[p] = p;
  }

  auto links = static_cast<std::size_t>(std::llround(static_cast<double>(n) * avg_degree / 2.0));
  std::vector<PeerId> order = everyone;
  rng.shuffle(order.begin(), order.end());
  std::vector<std::size_t> quota(n, links / n);
  for (std::size_t i = 0; i < links % n; ++i) ++quota[order[i]];

  for (auto i : order) {
    for (std::size_t l = 0; l < quota[i]; ++l) {
      auto fresh = [&](PeerId c) { return c != i && !g.has_edge(i, c); };
      std::optional<PeerId> target;
      if (g.locality_aware(i) && rng.bernoulli(intra_fraction)) {
        target = pick_from(members[asn_of[i]], fresh, rng);
        if (!target) {
          target = pick_from(everyone, [&](PeerId c) { return fresh(c) && asn_of[c] != asn_of[i]; },
                             rng);
        }
      } else {
        target = pick_from(everyone, fresh, rng);
      }
      if (target) g.add_edge(i, *target);
    }
  }
  return g;
}

OverlayGraph build_overlay(const std::vector<AsIndex>& asn_of, int avg_degree,
                           double intra_fraction, double deploy_fraction, Rng& rng) {
  if (deploy_fraction < 0 || deploy_fraction > 1) {
    fail(ErrorCode::InfeasibleParameters, "deploy fraction must lie in [0, 1]");
  }
  std::size_t n = asn_of.size();
  std::vector<PeerId> order(n);
  for (PeerId p = 0; p < n; ++p) order[p] = p;
  rng.shuffle(order.begin(), order.end());
  auto aware_count = static_cast<std::size_t>(std::llround(deploy_fraction * static_cast<double>(n)));
  std::vector<bool> aware(n, false);
  for (std::size_t i = 0; i < aware_count; ++i) aware[order[i]] = true;
  return build_overlay(asn_of, avg_degree, intra_fraction, aware, rng);
}

std::vector<PeerId> connect_joiner(OverlayGraph& overlay, PeerId joiner,
                                   std::span<const PeerId> present, int degree,
                                   double intra_fraction, Rng& rng) {
  std::vector<PeerId> intra, inter;
  for (auto p : present) {
    if (p == joiner || overlay.has_edge(joiner, p)) continue;
    (overlay.asn_of(p) == overlay.asn_of(joiner) ? intra : inter).push_back(p);
  }
  std::size_t want = static_cast<std::size_t>(std::max(degree, 0));
  std::vector<PeerId> chosen;
  if (overlay.locality_aware(joiner)) {
    rng.shuffle(intra.begin(), intra.end());
    rng.shuffle(inter.begin(), inter.end());
    auto want_intra = static_cast<std::size_t>(std::llround(intra_fraction * static_cast<double>(want)));
    std::size_t take_intra = std::min(want_intra, intra.size());
    std::size_t take_inter = std::min(want - take_intra, inter.size());
    // Spill back inside when the external side runs short.
    take_intra = std::min(intra.size(), want - take_inter);
    chosen.insert(chosen.end(), intra.begin(), intra.begin() + static_cast<std::ptrdiff_t>(take_intra));
    chosen.insert(chosen.end(), inter.begin(), inter.begin() + static_cast<std::ptrdiff_t>(take_inter));
  } else {
    std::vector<PeerId> all = intra;
    all.insert(all.end(), inter.begin(), inter.end());
    rng.shuffle(all.begin(), all.end());
    all.resize(std::min(want, all.size()));
    chosen = std::move(all);
  }
  for (auto p : chosen) overlay.add_edge(joiner, p);
  return chosen;
}

int peer_distance(PeerId i, PeerId j, const OverlayGraph& overlay,
                  const UnderlayGraph& underlay) {
  AsIndex a = overlay.asn_of(i), b = overlay.asn_of(j);
  return a == b ? 0 : underlay.hops(a, b);
}

void write_overlay(std::ostream& out, const OverlayGraph& overlay,
                   const UnderlayGraph& underlay) {
  out << "# overlay: peer table then edges\n";
  out << "peers " << overlay.peer_count() << '\n';
  for (PeerId p = 0; p < overlay.peer_count(); ++p) {
    out << p << ' ' << underlay.label(overlay.asn_of(p)) << '\n';
  }
  for (PeerId p = 0; p < overlay.peer_count(); ++p) {
    for (auto q : overlay.neighbors(p))
      if (p < q) out << p << ' ' << q << '\n';
  }
}

OverlayGraph read_overlay(std::istream& in, const UnderlayGraph& underlay) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](std::string& l) {
    while (std::getline(in, l)) {
      ++lineno;
      if (!blank_or_comment(l)) return true;
    }
    return false;
  };
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + why);
  };
  if (!next(line)) bad("missing peers header");
  std::istringstream hs(line);
  std::string word;
  std::size_t count = 0;
  if (!(hs >> word >> count) || word != "peers") bad("expected \"peers N\"");

  std::vector<AsIndex> asn(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!next(line)) bad("truncated peer table");
    std::istringstream ls(line);
    std::size_t id = 0;
    long label = 0;
    if (!(ls >> id >> label) || id != i) bad("expected \"" + std::to_string(i) + " asn\"");
    auto idx = underlay.index_of(label);
    if (!idx) bad("unknown AS " + std::to_string(label));
    asn[i] = *idx;
  }
  OverlayGraph g(asn, std::vector<bool>(count, false));
  while (next(line)) {
    std::istringstream ls(line);
    std::size_t u = 0, v = 0;
    if (!(ls >> u >> v) || u >= count || v >= count) bad("bad edge \"" + line + "\"");
    g.add_edge(static_cast<PeerId>(u), static_cast<PeerId>(v));
  }
  return g;
}

}  // namespace lanc::net

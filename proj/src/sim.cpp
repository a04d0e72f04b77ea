#include "lanc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lanc/error.hpp"
#include "lanc/rlnc.hpp"

namespace lanc::sim {

using net::AsIndex;
using policy::Scheme;
using rlnc::CodedBlock;

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Static: return "Static";
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
    case Scenario::D: return "D";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (auto s : {Scenario::Static, Scenario::A, Scenario::B, Scenario::C, Scenario::D}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

void SimConfig::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    fail(ErrorCode::ConfigError, field + ": " + why);
  };
  if (peers < 1) bad("peers", "must be >= 1");
  if (blocks < 1) bad("blocks", "must be >= 1");
  if (block_size < 1) bad("block_size", "must be >= 1");
  if (avg_degree < 1) bad("avg_degree", "must be >= 1");
  if (static_cast<std::size_t>(avg_degree) > peers) bad("avg_degree", "must be below the population");
  if (intra_fraction < 0 || intra_fraction > 1) bad("intra_fraction", "must lie in [0, 1]");
  if (deploy_fraction < 0 || deploy_fraction > 1) bad("deploy_fraction", "must lie in [0, 1]");
  if (policy.density && *policy.density < 1) bad("encoding_density", "must be >= 1 or all");
  if (policy.tft_threshold && *policy.tft_threshold < 0) bad("tft_threshold", "must be >= 0");
  if (capacity_up < 1) bad("capacity_up", "must be >= 1");
  if (capacity_down < 1) bad("capacity_down", "must be >= 1");
  if (hetero_fraction < 0 || hetero_fraction > 1) bad("hetero_fraction", "must lie in [0, 1]");
  if (hetero_multiplier < 1) bad("hetero_multiplier", "must be >= 1");
  if (scenario_params.batches < 1) bad("scenario", "needs at least one join batch");
  if (!(max_time > 0)) bad("max_time", "must be positive");
}

net::UnderlayGraph resolve_underlay(const std::string& source) {
  if (source == "synthetic") {
    Rng rng(kSyntheticUnderlaySeed);
    return net::generate_underlay(37, 156, rng);
  }
  if (source.rfind("synthetic:", 0) == 0) {
    std::istringstream in(source.substr(10));
    std::size_t ases = 0, edges = 0;
    std::uint64_t seed = kSyntheticUnderlaySeed;
    char sep = 0;
    if (!(in >> ases >> sep >> edges) || sep != ':') {
      fail(ErrorCode::ConfigError, "underlay: expected synthetic:ASES:EDGES[:SEED], got " + source);
    }
    if (in >> sep) {
      if (sep != ':' || !(in >> seed)) {
        fail(ErrorCode::ConfigError, "underlay: bad seed in " + source);
      }
    }
    Rng rng(seed);
    return net::generate_underlay(ases, edges, rng);
  }
  return net::load_underlay_file(source);
}

double sample_link_delay(Rng& rng) { return rng.uniform(0.75, 1.25); }

namespace {

enum Stream : std::uint64_t { kPlacement = 1, kOverlay, kCapacity, kEngine, kContent };

enum class EventKind { Tick, Arrival, JoinBatch, Depart, ServerDepart, Churn };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::size_t arg;

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

struct Transfer {
  PeerId src;
  PeerId dst;
  double request_time;
  std::optional<CodedBlock> coded;
  std::size_t block_id = 0;
  bool done = false;
};

struct Peer {
  AsIndex as = 0;
  int cap_up = 0;
  int cap_down = 0;
  int active_up = 0;
  int active_down = 0;
  bool server = false;
  bool present = false;
  bool departed = false;
  double join_time = 0;
  std::optional<double> finish_time;
  std::optional<double> depart_time;
  std::uint64_t uploaded = 0;
  std::uint64_t downloaded = 0;

  // Coded schemes: the reduced coefficient matrix, and its rows as blocks to
  // encode responses from.
  rlnc::CoeffMatrix matrix{1};
  std::vector<CodedBlock> buffer;
  // Non-coded schemes.
  policy::BlockSet held;
  policy::BlockSet downloading;

  policy::TftLedger ledger;
  std::unordered_map<PeerId, std::size_t> in_flight_from;
};

void refresh_buffer(Peer& p) {
  const auto& m = p.matrix;
  p.buffer.resize(m.rank());
  for (std::size_t r = 0; r < m.rank(); ++r) {
    auto c = m.row(r);
    auto pl = m.payload(r);
    p.buffer[r].coeffs.assign(c.begin(), c.end());
    p.buffer[r].payload.assign(pl.begin(), pl.end());
  }
}

std::uint64_t edge_key(PeerId a, PeerId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

class Engine {
 public:
  Engine(const SimConfig& cfg, const net::UnderlayGraph& underlay)
      : cfg_(cfg), underlay_(underlay), coded_(policy::is_coded(cfg.policy.scheme)),
        spec_(rlnc::FileSpec::exact(cfg.blocks, cfg.block_size)),
        rng_(derive_seed(cfg.seed, kEngine)) {}

  RunResult run();

 private:
  void setup();
  void push(double time, EventKind kind, std::size_t arg = 0) {
    queue_.push(Event{time, seq_++, kind, arg});
  }

  bool complete(const Peer& p) const {
    return coded_ ? p.matrix.full() : p.held.count() == cfg_.blocks;
  }
  bool active(PeerId id) const { return peers_[id].present && !peers_[id].departed; }
  bool admits(PeerId responder, PeerId requester) const;
  std::size_t innovative(PeerId i, PeerId j) const;

  std::size_t schedule_round(PeerId i, double now);
  void issue(PeerId i, const policy::RequestDecision& d, double now);
  void on_tick(double now);
  void on_arrival(std::size_t id, double now);
  void on_join_batch(std::size_t batch, double now);
  void depart(PeerId p, double now);
  void on_churn(double now);

  void add_joint(PeerId a, PeerId b);
  void accept_into(PeerId i, const CodedBlock& block);
  void verify_decode(const Peer& p);
  void check_invariants() const;

  const SimConfig& cfg_;
  const net::UnderlayGraph& underlay_;
  bool coded_;
  rlnc::FileSpec spec_;
  Rng rng_;

  std::vector<Peer> peers_;
  net::OverlayGraph overlay_;
  std::vector<std::uint8_t> file_;
  std::vector<std::vector<PeerId>> batches_;
  std::vector<PeerId> present_;
  std::unordered_map<std::uint64_t, rlnc::JointSpan> joint_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  std::vector<Transfer> transfers_;
  std::set<std::size_t> in_flight_;
  std::uint64_t server_served_ = 0;
  std::size_t requests_ = 0;

  TransferTrace trace_;
};

void Engine::setup() {
  std::size_t total = cfg_.peers + 1;

  AsIndex server_as = underlay_.max_degree_as();
  if (cfg_.server_as) {
    auto idx = underlay_.index_of(*cfg_.server_as);
    if (!idx) {
      fail(ErrorCode::ConfigError,
           "server_as: AS " + std::to_string(*cfg_.server_as) + " is not in the underlay");
    }
    server_as = *idx;
  }
  Rng placement(derive_seed(cfg_.seed, kPlacement));
  std::vector<AsIndex> asn_of{server_as};
  auto placed = net::assign_peers(underlay_, cfg_.peers, cfg_.placement, placement);
  asn_of.insert(asn_of.end(), placed.begin(), placed.end());

  Rng overlay_rng(derive_seed(cfg_.seed, kOverlay));
  std::vector<PeerId> order(cfg_.peers);
  for (std::size_t i = 0; i < cfg_.peers; ++i) order[i] = static_cast<PeerId>(i + 1);
  overlay_rng.shuffle(order.begin(), order.end());
  std::vector<bool> aware(total, false);
  aware[0] = cfg_.server_locality;
  auto aware_count = static_cast<std::size_t>(
      std::llround(cfg_.deploy_fraction * static_cast<double>(cfg_.peers)));
  for (std::size_t i = 0; i < aware_count; ++i) aware[order[i]] = true;

  bool churn_join = cfg_.scenario == Scenario::A || cfg_.scenario == Scenario::B ||
                    cfg_.scenario == Scenario::C;
  if (churn_join) {
    overlay_ = net::OverlayGraph(asn_of, aware);
  } else {
    bool connected = false;
    for (std::uint64_t attempt = 0; attempt < 10 && !connected; ++attempt) {
      Rng r(derive_seed(derive_seed(cfg_.seed, kOverlay), attempt));
      overlay_ = net::build_overlay(asn_of, cfg_.avg_degree, cfg_.intra_fraction, aware, r);
      connected = overlay_.all_reachable_from(0);
    }
    if (!connected) {
      fail(ErrorCode::DisconnectedTopology,
           "overlay stayed disconnected from the server after 10 attempts");
    }
  }

  peers_.resize(total);
  Rng cap_rng(derive_seed(cfg_.seed, kCapacity));
  std::vector<PeerId> fast = order;
  cap_rng.shuffle(fast.begin(), fast.end());
  auto fast_count = static_cast<std::size_t>(
      std::llround(cfg_.hetero_fraction * static_cast<double>(cfg_.peers)));
  std::vector<bool> is_fast(total, false);
  for (std::size_t i = 0; i < fast_count; ++i) is_fast[fast[i]] = true;
  is_fast[0] = cfg_.server_high_capacity;

  for (PeerId id = 0; id < total; ++id) {
    auto& p = peers_[id];
    p.as = asn_of[id];
    p.server = id == 0;
    int mult = is_fast[id] ? cfg_.hetero_multiplier : 1;
    p.cap_up = cfg_.capacity_up * mult;
    p.cap_down = cfg_.capacity_down * mult;
    if (coded_) {
      p.matrix = rlnc::CoeffMatrix(cfg_.blocks, cfg_.block_size);
    } else {
      p.held = policy::BlockSet(cfg_.blocks);
      p.downloading = policy::BlockSet(cfg_.blocks);
    }
  }

  Rng content(derive_seed(cfg_.seed, kContent));
  file_.resize(spec_.padded_size());
  for (auto& b : file_) b = content.byte();

  auto& server = peers_[0];
  server.present = true;
  if (coded_) {
    for (const auto& b : rlnc::seed_blocks(file_, spec_)) server.matrix.insert(b);
    refresh_buffer(server);
  } else {
    for (std::size_t b = 0; b < cfg_.blocks; ++b) server.held.insert(b);
  }
  present_.push_back(0);

  const auto& sp = cfg_.scenario_params;
  if (churn_join) {
    batches_.resize(sp.batches);
    for (std::size_t i = 0; i < cfg_.peers; ++i) {
      batches_[i * sp.batches / cfg_.peers].push_back(static_cast<PeerId>(i + 1));
    }
    for (std::size_t b = 0; b < sp.batches; ++b) {
      push(static_cast<double>(b) * sp.batch_interval, EventKind::JoinBatch, b);
    }
    if (cfg_.scenario == Scenario::B) {
      push(static_cast<double>(sp.batches - 1) * sp.batch_interval + sp.server_linger,
           EventKind::ServerDepart);
    }
  } else {
    for (PeerId id = 1; id < total; ++id) {
      peers_[id].present = true;
      present_.push_back(id);
    }
    if (coded_) {
      for (PeerId a = 0; a < total; ++a)
        for (auto b : overlay_.neighbors(a))
          if (a < b) add_joint(a, b);
    }
    if (cfg_.scenario == Scenario::D) {
      for (double t = sp.churn_interval; t <= sp.churn_until + 1e-9; t += sp.churn_interval) {
        push(t, EventKind::Churn);
      }
    }
  }
  push(0.0, EventKind::Tick);
}

void Engine::add_joint(PeerId a, PeerId b) {
  rlnc::JointSpan span(cfg_.blocks);
  for (PeerId p : {a, b}) {
    const auto& m = peers_[p].matrix;
    for (std::size_t r = 0; r < m.rank() && !span.full(); ++r) span.insert(m.row(r));
  }
  joint_.insert_or_assign(edge_key(a, b), std::move(span));
}

bool Engine::admits(PeerId responder, PeerId requester) const {
  const auto& r = peers_[responder];
  if (!active(responder) || r.active_up >= r.cap_up) return false;
  if (r.server) return true;
  return policy::tft_admit(r.ledger, requester, cfg_.policy.tft_threshold);
}

std::size_t Engine::innovative(PeerId i, PeerId j) const {
  const auto& span = joint_.at(edge_key(i, j));
  return span.dim() - peers_[i].matrix.rank();
}

std::size_t Engine::schedule_round(PeerId i, double now) {
  auto& me = peers_[i];
  if (!active(i) || me.server || complete(me)) return 0;
  std::size_t issued = 0;
  const auto& nbrs = overlay_.neighbors(i);
  while (me.active_down < me.cap_down) {
    std::optional<policy::RequestDecision> d;
    if (coded_) {
      std::vector<policy::CodedNeighbor> view;
      view.reserve(nbrs.size());
      for (auto j : nbrs) {
        auto it = me.in_flight_from.find(j);
        view.push_back({j, net::peer_distance(i, j, overlay_, underlay_), admits(j, i),
                        innovative(i, j), it == me.in_flight_from.end() ? 0 : it->second,
                        peers_[j].buffer});
      }
      d = policy::select_request_lanc(me.matrix, view, cfg_.policy.scheme, rng_);
    } else {
      std::vector<policy::PlainNeighbor> view;
      view.reserve(nbrs.size());
      for (auto j : nbrs) {
        view.push_back({j, net::peer_distance(i, j, overlay_, underlay_), admits(j, i),
                        &peers_[j].held});
      }
      d = cfg_.policy.scheme == Scheme::Random
              ? policy::select_request_random(me.held, me.downloading, view, rng_)
              : policy::select_request_la_lr(me.held, me.downloading, view, rng_);
    }
    if (!d) break;
    issue(i, *d, now);
    ++issued;
  }
  return issued;
}

void Engine::issue(PeerId i, const policy::RequestDecision& d, double now) {
  PeerId j = d.target;
  Transfer t{j, i, now, std::nullopt, 0, false};
  if (coded_) {
    t.coded = policy::respond_coded(peers_[j].buffer, d.pivot_hint, cfg_.policy.density, rng_);
  } else {
    t.block_id = policy::respond_plain(peers_[j].held, *d.block_id);
    peers_[i].downloading.insert(t.block_id);
  }
  ++peers_[j].active_up;
  ++peers_[i].active_down;
  ++peers_[i].in_flight_from[j];
  ++requests_;

  std::size_t id = transfers_.size();
  transfers_.push_back(std::move(t));
  in_flight_.insert(id);
  push(now + sample_link_delay(rng_), EventKind::Arrival, id);
}

void Engine::accept_into(PeerId i, const CodedBlock& block) {
  for (auto j : overlay_.neighbors(i)) {
    auto it = joint_.find(edge_key(i, j));
    if (it != joint_.end()) it->second.insert(block.coeffs);
  }
}

void Engine::verify_decode(const Peer& p) {
  if (!coded_) return;  // plain blocks are verbatim copies of the originals
  auto out = rlnc::decode(p.matrix, spec_);
  if (out != file_) ++trace_.decode_failures;
}

void Engine::on_arrival(std::size_t id, double now) {
  auto& t = transfers_[id];
  if (t.done) return;  // cancelled by a departure
  t.done = true;
  in_flight_.erase(id);

  auto& src = peers_[t.src];
  auto& dst = peers_[t.dst];
  --src.active_up;
  --dst.active_down;
  if (--dst.in_flight_from[t.src] == 0) dst.in_flight_from.erase(t.src);

  bool accepted;
  if (coded_) {
    accepted = dst.matrix.insert(*t.coded);
    if (accepted) {
      accept_into(t.dst, *t.coded);
      refresh_buffer(dst);
    }
    t.coded.reset();
  } else {
    dst.downloading.erase(t.block_id);
    accepted = !dst.held.contains(t.block_id);
    dst.held.insert(t.block_id);
  }

  int hops = net::peer_distance(t.src, t.dst, overlay_, underlay_);
  trace_.transfers.push_back({t.request_time, now, t.src, t.dst, hops, !accepted});
  trace_.online_interdomain_hops += static_cast<std::uint64_t>(hops);
  src.ledger.record_upload(t.dst);
  dst.ledger.record_download(t.src);
  ++src.uploaded;
  ++dst.downloaded;

  if (accepted && !dst.finish_time && complete(dst)) {
    dst.finish_time = now;
    verify_decode(dst);
    if (cfg_.scenario == Scenario::A || cfg_.scenario == Scenario::B ||
        cfg_.scenario == Scenario::C) {
      push(now + cfg_.scenario_params.linger, EventKind::Depart, t.dst);
    }
  }

  PeerId receiver = t.dst;
  if (src.server && cfg_.scenario == Scenario::C &&
      ++server_served_ == cfg_.scenario_params.server_budget) {
    depart(0, now);
  }
  schedule_round(receiver, now);
}

void Engine::depart(PeerId p, double now) {
  auto& peer = peers_[p];
  if (peer.departed || !peer.present) return;
  peer.departed = true;
  peer.depart_time = now;

  std::vector<std::size_t> cancel;
  for (auto id : in_flight_) {
    const auto& t = transfers_[id];
    if (t.src == p || t.dst == p) cancel.push_back(id);
  }
  for (auto id : cancel) {
    auto& t = transfers_[id];
    t.done = true;
    t.coded.reset();
    in_flight_.erase(id);
    auto& src = peers_[t.src];
    auto& dst = peers_[t.dst];
    --src.active_up;
    --dst.active_down;
    if (--dst.in_flight_from[t.src] == 0) dst.in_flight_from.erase(t.src);
    if (!coded_) dst.downloading.erase(t.block_id);
  }

  for (auto q : overlay_.neighbors(p)) joint_.erase(edge_key(p, q));
  overlay_.isolate(p);
  present_.erase(std::find(present_.begin(), present_.end(), p));
}

void Engine::on_join_batch(std::size_t batch, double now) {
  auto members = batches_[batch];
  rng_.shuffle(members.begin(), members.end());
  for (auto id : members) {
    auto& p = peers_[id];
    p.present = true;
    p.join_time = now;
    auto added = net::connect_joiner(overlay_, id, present_, cfg_.avg_degree,
                                     cfg_.intra_fraction, rng_);
    if (coded_) {
      for (auto q : added) add_joint(id, q);
    }
    present_.push_back(id);
  }
}

void Engine::on_churn(double now) {
  std::vector<PeerId> candidates;
  for (auto id : present_)
    if (id != 0) candidates.push_back(id);
  auto k = static_cast<std::size_t>(std::llround(cfg_.scenario_params.churn_fraction *
                                                 static_cast<double>(cfg_.peers)));
  k = std::min(std::max<std::size_t>(k, 1), candidates.size());
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + rng_.below(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    depart(candidates[i], now);
  }
}

void Engine::on_tick(double now) {
  std::vector<PeerId> order = present_;
  rng_.shuffle(order.begin(), order.end());
  std::size_t issued = 0;
  for (auto id : order) issued += schedule_round(id, now);
  if ((issued > 0 || !queue_.empty()) && now + 1.0 <= cfg_.max_time) {
    push(now + 1.0, EventKind::Tick);
  }
}

void Engine::check_invariants() const {
  std::vector<int> up(peers_.size(), 0), down(peers_.size(), 0);
  for (auto id : in_flight_) {
    ++up[transfers_[id].src];
    ++down[transfers_[id].dst];
  }
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    const auto& p = peers_[i];
    if (up[i] != p.active_up || down[i] != p.active_down || p.active_up > p.cap_up ||
        p.active_down > p.cap_down) {
      fail(ErrorCode::ConfigError, "slot accounting broken at peer " + std::to_string(i));
    }
    if (p.finish_time && !complete(p)) {
      fail(ErrorCode::ConfigError, "peer " + std::to_string(i) + " finished below full rank");
    }
  }
}

RunResult Engine::run() {
  setup();
  while (!queue_.empty()) {
    Event e = queue_.top();
    queue_.pop();
    if (e.time > cfg_.max_time) break;
    switch (e.kind) {
      case EventKind::Tick: on_tick(e.time); break;
      case EventKind::Arrival: on_arrival(e.arg, e.time); break;
      case EventKind::JoinBatch: on_join_batch(e.arg, e.time); break;
      case EventKind::Depart: depart(static_cast<PeerId>(e.arg), e.time); break;
      case EventKind::ServerDepart: depart(0, e.time); break;
      case EventKind::Churn: on_churn(e.time); break;
    }
    if (cfg_.check_invariants) check_invariants();
  }

  trace_.blocks = cfg_.blocks;
  trace_.peers.resize(peers_.size());
  for (PeerId id = 0; id < peers_.size(); ++id) {
    const auto& p = peers_[id];
    auto& s = trace_.peers[id];
    s.id = id;
    s.as_index = p.as;
    s.asn = underlay_.label(p.as);
    s.server = p.server;
    s.join_time = p.join_time;
    s.finish_time = p.server ? std::optional<double>(0.0) : p.finish_time;
    s.depart_time = p.depart_time;
    s.uploaded = p.uploaded;
    s.downloaded = p.downloaded;
  }

  RunResult result;
  result.report = metrics::compute_report(trace_);
  result.requests_issued = requests_;
  result.trace = std::move(trace_);
  return result;
}

}  // namespace

RunResult run(const SimConfig& config, const net::UnderlayGraph& underlay) {
  config.validate();
  Engine engine(config, underlay);
  return engine.run();
}

RunResult run(const SimConfig& config) {
  config.validate();
  auto underlay = resolve_underlay(config.underlay);
  return run(config, underlay);
}

}  // namespace lanc::sim

#include "lanc/policies.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "lanc/error.hpp"

namespace lanc::policy {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Random: return "Random";
    case Scheme::LA_LR: return "LA_LR";
    case Scheme::P_LANC: return "P_LANC";
    case Scheme::LANC_Random: return "LANC_Random";
    case Scheme::LANC_Informed: return "LANC_Informed";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto s : {Scheme::Random, Scheme::LA_LR, Scheme::P_LANC, Scheme::LANC_Random,
                 Scheme::LANC_Informed}) {
    if (name == to_string(s)) return s;
  }
  if (name == "LANC") return Scheme::LANC_Random;
  return std::nullopt;
}

bool is_coded(Scheme s) { return s != Scheme::Random && s != Scheme::LA_LR; }

namespace {

// Uniform choice among the minimizers of key(x), in one pass (reservoir).
template <typename T, typename Key>
std::optional<T> uniform_argmin(std::span<const T> items, Key key, Rng& rng) {
  std::optional<T> best;
  long best_key = std::numeric_limits<long>::max();
  std::uint64_t ties = 0;
  for (const auto& x : items) {
    long k = key(x);
    if (k < best_key) {
      best_key = k;
      best = x;
      ties = 1;
    } else if (k == best_key && rng.below(++ties) == 0) {
      best = x;
    }
  }
  return best;
}

std::optional<RequestDecision> pick_owner(std::size_t block,
                                          std::span<const PlainNeighbor> neighbors,
                                          bool by_distance, Rng& rng) {
  std::vector<PlainNeighbor> owners;
  for (const auto& nb : neighbors)
    if (nb.admits && nb.held->contains(block)) owners.push_back(nb);
  auto chosen = uniform_argmin<PlainNeighbor>(
      owners, [&](const PlainNeighbor& nb) { return by_distance ? nb.hops : 0L; }, rng);
  if (!chosen) return std::nullopt;
  return RequestDecision{chosen->id, std::nullopt, block};
}

}  // namespace

std::optional<RequestDecision> select_request_la_lr(const BlockSet& held,
                                                    const BlockSet& downloading,
                                                    std::span<const PlainNeighbor> neighbors,
                                                    Rng& rng) {
  std::size_t n = held.universe();
  std::vector<std::size_t> rarest;
  long best = std::numeric_limits<long>::max();
  for (std::size_t b = 0; b < n; ++b) {
    if (held.contains(b) || downloading.contains(b)) continue;
    long copies = 0;
    bool feasible = false;
    for (const auto& nb : neighbors) {
      if (nb.held->contains(b)) {
        ++copies;
        feasible |= nb.admits;
      }
    }
    if (!feasible) continue;
    if (copies < best) {
      best = copies;
      rarest.clear();
    }
    if (copies == best) rarest.push_back(b);
  }
  if (rarest.empty()) return std::nullopt;
  return pick_owner(rarest[rng.below(rarest.size())], neighbors, true, rng);
}

std::optional<RequestDecision> select_request_random(const BlockSet& held,
                                                     const BlockSet& downloading,
                                                     std::span<const PlainNeighbor> neighbors,
                                                     Rng& rng) {
  std::size_t n = held.universe();
  std::vector<std::size_t> wanted;
  for (std::size_t b = 0; b < n; ++b) {
    if (held.contains(b) || downloading.contains(b)) continue;
    for (const auto& nb : neighbors) {
      if (nb.admits && nb.held->contains(b)) {
        wanted.push_back(b);
        break;
      }
    }
  }
  if (wanted.empty()) return std::nullopt;
  return pick_owner(wanted[rng.below(wanted.size())], neighbors, false, rng);
}

std::optional<RequestDecision> select_request_lanc(const rlnc::CoeffMatrix& mine,
                                                   std::span<const CodedNeighbor> neighbors,
                                                   Scheme scheme, Rng& rng) {
  if (!is_coded(scheme)) {
    fail(ErrorCode::ConfigError, "select_request_lanc called for a non-coded scheme");
  }
  if (mine.full()) return std::nullopt;
  std::vector<CodedNeighbor> candidates;
  for (const auto& nb : neighbors)
    if (nb.admits && nb.innovative > nb.in_flight) candidates.push_back(nb);
  bool local = scheme != Scheme::P_LANC;
  auto chosen = uniform_argmin<CodedNeighbor>(
      candidates, [&](const CodedNeighbor& nb) { return local ? nb.hops : 0L; }, rng);
  if (!chosen) return std::nullopt;

  RequestDecision d{chosen->id, std::nullopt, std::nullopt};
  if (scheme == Scheme::LANC_Informed) {
    // First hit in a random order is a uniform draw from innovative_pivots().
    std::vector<std::size_t> order(chosen->buffer.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    for (auto idx : order) {
      if (mine.is_innovative(chosen->buffer[idx].coeffs)) {
        d.pivot_hint = idx;
        break;
      }
    }
  }
  return d;
}

rlnc::CodedBlock respond_coded(std::span<const rlnc::CodedBlock> buffer,
                               std::optional<std::size_t> pivot_hint,
                               std::optional<int> density, Rng& rng) {
  if (buffer.empty()) fail(ErrorCode::EmptyBuffer, "cannot encode from an empty buffer");
  if (pivot_hint && *pivot_hint >= buffer.size()) {
    fail(ErrorCode::UnknownBlock, "pivot hint " + std::to_string(*pivot_hint) +
                                      " outside buffer of " + std::to_string(buffer.size()));
  }
  std::size_t size = buffer.size();
  std::size_t m = density ? std::min<std::size_t>(static_cast<std::size_t>(*density), size) : size;

  std::vector<std::size_t> pool(size);
  std::iota(pool.begin(), pool.end(), 0);
  std::size_t fixed = 0;
  if (pivot_hint) {
    std::swap(pool[0], pool[*pivot_hint]);
    fixed = 1;
  }
  if (m < size) {
    for (std::size_t i = fixed; i < m; ++i) {
      auto j = i + rng.below(size - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
  }

  std::vector<gf::Element> coeffs;
  if (pivot_hint) {
    coeffs.resize(m);
    coeffs[0] = static_cast<gf::Element>(1 + rng.below(255));
    for (std::size_t i = 1; i < m; ++i) coeffs[i] = rng.byte();
  } else {
    coeffs = rlnc::draw_local_coeffs(m, rng).values;
  }
  return rlnc::encode(buffer, pool, coeffs);
}

std::size_t respond_plain(const BlockSet& held, std::size_t block_id) {
  if (block_id >= held.universe() || !held.contains(block_id)) {
    fail(ErrorCode::UnknownBlock, "block " + std::to_string(block_id) + " is not held");
  }
  return block_id;
}

}  // namespace lanc::policy

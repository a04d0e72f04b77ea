#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lanc/netmodel.hpp"
#include "lanc/random.hpp"
#include "lanc/rlnc.hpp"

namespace lanc::policy {

using net::PeerId;

enum class Scheme { Random, LA_LR, P_LANC, LANC_Random, LANC_Informed };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
bool is_coded(Scheme s);

struct SchedulingPolicy {
  Scheme scheme = Scheme::LANC_Random;
  /// Blocks combined per coded response; nullopt means the whole buffer.
  std::optional<int> density;
  /// Tit-for-tat threshold C; nullopt disables the mechanism.
  std::optional<int> tft_threshold;
};

/// Fixed-size set of original block ids.
class BlockSet {
 public:
  BlockSet() = default;
  explicit BlockSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t universe() const { return n_; }
  bool contains(std::size_t b) const { return (words_[b >> 6] >> (b & 63)) & 1U; }
  void insert(std::size_t b) {
    if (!contains(b)) ++count_;
    words_[b >> 6] |= std::uint64_t{1} << (b & 63);
  }
  void erase(std::size_t b) {
    if (contains(b)) --count_;
    words_[b >> 6] &= ~(std::uint64_t{1} << (b & 63));
  }
  std::size_t count() const { return count_; }

 private:
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

struct RequestDecision {
  PeerId target = 0;
  /// LANC-informed: index into the target's buffer of a block known to be
  /// innovative for the requester.
  std::optional<std::size_t> pivot_hint;
  /// Non-coded schemes: the original block requested.
  std::optional<std::size_t> block_id;
};

/// A neighbor as seen by a non-coded requester.
struct PlainNeighbor {
  PeerId id = 0;
  int hops = 0;
  /// Free upload slot and tit-for-tat admission toward the requester.
  bool admits = true;
  const BlockSet* held = nullptr;
};

/// Local rarest first over B(i) + {i}, then the closest admitting owner.
/// Only blocks with at least one admitting owner are considered. Ties are
/// broken uniformly at random.
std::optional<RequestDecision> select_request_la_lr(const BlockSet& held,
                                                    const BlockSet& downloading,
                                                    std::span<const PlainNeighbor> neighbors,
                                                    Rng& rng);

/// Uniform needed block among those with an admitting owner, then a uniform
/// admitting owner. No rarity and no locality.
std::optional<RequestDecision> select_request_random(const BlockSet& held,
                                                     const BlockSet& downloading,
                                                     std::span<const PlainNeighbor> neighbors,
                                                     Rng& rng);

/// A neighbor as seen by a coded requester.
struct CodedNeighbor {
  PeerId id = 0;
  int hops = 0;
  bool admits = true;
  /// r = rank([A_i; A_j]) - rank(A_i).
  std::size_t innovative = 0;
  /// q: blocks currently in flight from this neighbor to the requester.
  std::size_t in_flight = 0;
  /// The neighbor's held blocks; only consulted by LANC-informed.
  std::span<const rlnc::CodedBlock> buffer;
};

/// Candidates are admitting neighbors with r - q > 0. LANC variants take the
/// closest one, P-LANC any one; ties are uniform. LANC-informed also names a
/// uniformly chosen innovative block on the target.
std::optional<RequestDecision> select_request_lanc(const rlnc::CoeffMatrix& mine,
                                                   std::span<const CodedNeighbor> neighbors,
                                                   Scheme scheme, Rng& rng);

/// Encodes over min(m, |buffer|) distinct uniformly chosen blocks. A pivot
/// hint is always among them and gets a nonzero coefficient.
/// Throws EmptyBuffer, or UnknownBlock for an out-of-range hint.
rlnc::CodedBlock respond_coded(std::span<const rlnc::CodedBlock> buffer,
                               std::optional<std::size_t> pivot_hint,
                               std::optional<int> density, Rng& rng);

/// Verbatim copy of an original block. Throws UnknownBlock when not held.
std::size_t respond_plain(const BlockSet& held, std::size_t block_id);

/// Per-neighbor (uploaded - downloaded) block balance of one peer.
class TftLedger {
 public:
  void record_upload(PeerId to) { ++balance_[to]; }
  void record_download(PeerId from) { --balance_[from]; }
  long balance(PeerId other) const {
    auto it = balance_.find(other);
    return it == balance_.end() ? 0 : it->second;
  }

 private:
  std::unordered_map<PeerId, long> balance_;
};

/// Admit unless the balance toward the requester exceeds C.
inline bool tft_admit(long balance, std::optional<int> threshold) {
  return !threshold || balance <= *threshold;
}

inline bool tft_admit(const TftLedger& ledger, PeerId requester, std::optional<int> threshold) {
  return tft_admit(ledger.balance(requester), threshold);
}

}  // namespace lanc::policy

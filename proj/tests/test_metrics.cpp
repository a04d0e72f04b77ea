#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <cmath>

#include "lanc/error.hpp"
#include "lanc/metrics.hpp"
#include "lanc/sim.hpp"

using namespace lanc;
using namespace lanc::metrics;
using net::PeerId;
using sim::PeerSummary;
using sim::TransferRecord;
using sim::TransferTrace;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

PeerSummary peer(PeerId id, net::AsIndex as, std::optional<double> finish, double join = 0) {
  PeerSummary p;
  p.id = id;
  p.as_index = as;
  p.asn = 100 + static_cast<long>(as);
  p.server = id == 0;
  p.join_time = join;
  p.finish_time = finish;
  return p;
}

// Three ASes on a line X - Y - Z; server in X.
TransferTrace line_fixture() {
  TransferTrace t;
  t.blocks = 2;
  t.peers = {peer(0, 0, 0.0), peer(1, 1, 4.0), peer(2, 2, 6.0), peer(3, 2, 5.0, 1.0)};
  t.transfers = {
      {0.0, 1.0, 0, 1, 1, false},  // X -> Y
      {0.0, 1.1, 0, 2, 2, false},  // X -> Z
      {1.0, 2.2, 1, 2, 1, false},  // Y -> Z
      {1.5, 2.5, 2, 3, 0, false},  // intra Z
      {2.0, 3.4, 0, 3, 2, true},   // X -> Z, dependent
  };
  for (const auto& r : t.transfers) {
    ++t.peers[r.src].uploaded;
    ++t.peers[r.dst].downloaded;
  }
  return t;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("idtr on a hand-built line") {
  auto t = line_fixture();
  CHECK(populated_as_count(t) == 3);
  // Hops 1 + 2 + 1 + 0 + 2 = 6 over 2 blocks * (3 - 1) ASes.
  CHECK(idtr(t, 2) == doctest::Approx(6.0 / 4.0));
}

TEST_CASE("idtr denominator with 37 populated ASes") {
  TransferTrace t;
  for (PeerId p = 0; p < 37; ++p) t.peers.push_back(peer(p, p, 1.0));
  t.transfers.push_back({0, 1, 0, 1, 3600, false});
  CHECK(idtr(t, 100) == doctest::Approx(1.0));
}

TEST_CASE("single populated AS") {
  TransferTrace t;
  t.peers = {peer(0, 4, 0.0), peer(1, 4, 1.0)};
  t.transfers.push_back({0, 1, 0, 1, 0, false});
  CHECK(idtr(t, 1) == 1.0);
  t.transfers.push_back({0, 1, 0, 1, 2, false});
  CHECK(code_of([&] { idtr(t, 1); }) == ErrorCode::DegenerateTopology);
}

TEST_CASE("distribution times") {
  SUBCASE("two peers at DT 4 and 6") {
    TransferTrace t;
    t.peers = {peer(0, 0, 0.0), peer(1, 0, 4.0), peer(2, 0, 8.0, 2.0)};
    auto d = distribution_times(t);
    CHECK(d.avg_dt == doctest::Approx(5.0));
    CHECK(d.max_dt == doctest::Approx(6.0));
    CHECK(d.unfinished_count == 0);
  }
  SUBCASE("unfinished peers are excluded and counted") {
    TransferTrace t;
    t.peers = {peer(0, 0, 0.0), peer(1, 0, 4.0), peer(2, 0, std::nullopt)};
    auto d = distribution_times(t);
    CHECK(d.avg_dt == doctest::Approx(4.0));
    CHECK(d.unfinished_count == 1);
    CHECK(unfinished_count(t) == 1);
  }
  SUBCASE("nobody finished") {
    TransferTrace t;
    t.peers = {peer(0, 0, 0.0), peer(1, 0, std::nullopt)};
    CHECK(code_of([&] { distribution_times(t); }) == ErrorCode::NoFinishedPeers);
    auto r = compute_report(t);
    CHECK_FALSE(r.avg_dt.has_value());
    CHECK(r.unfinished_fraction == 1.0);
  }
}

TEST_CASE("temporal series") {
  SUBCASE("empty trace") {
    TransferTrace t;
    auto s = temporal_series(t, 1.0);
    for (const auto& slot : s) {
      CHECK(slot.transfers == 0);
      CHECK(slot.weighted_transfers == 0);
    }
  }
  SUBCASE("bins partition the inter-domain transfers") {
    auto t = line_fixture();
    auto s = temporal_series(t, 1.0);
    std::uint64_t count = 0, weighted = 0;
    for (const auto& slot : s) {
      count += slot.transfers;
      weighted += slot.weighted_transfers;
    }
    CHECK(count == 4);
    CHECK(weighted == 6);
    REQUIRE(s.size() >= 4);
    CHECK(s[1].transfers == 2);
    CHECK(s[1].weighted_transfers == 3);
    CHECK(s[2].transfers == 1);
    CHECK(s[3].weighted_transfers == 2);
  }
  SUBCASE("bin width must be positive") {
    auto t = line_fixture();
    CHECK(code_of([&] { temporal_series(t, 0.0); }) == ErrorCode::ValidationError);
  }
}

TEST_CASE("upload histogram") {
  auto t = line_fixture();
  auto h = upload_histogram(t);
  REQUIRE(h.counts.size() == 4);
  CHECK(h.counts[0] == 3);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}) == t.transfers.size());
  // Non-server uploads 1, 1, 0: mean 2/3, population sd sqrt(2)/3.
  CHECK(h.cov == doctest::Approx(std::sqrt(2.0) / 2.0));
}

TEST_CASE("report fields") {
  auto t = line_fixture();
  auto r = compute_report(t);
  CHECK(r.idtr == doctest::Approx(1.5));
  CHECK(r.total_interdomain_block_hops == 6);
  CHECK(r.dependent_block_count == 1);
  CHECK(r.total_transfers == 5);
  CHECK(*r.avg_dt <= *r.max_dt);
}

TEST_CASE("simulated runs: online counter, partition identity, decay after the peak") {
  sim::SimConfig c;
  c.policy.scheme = policy::Scheme::LANC_Random;
  c.seed = 5;
  auto res = sim::run(c);
  const auto& r = res.report;
  CHECK(r.total_interdomain_block_hops == res.trace.online_interdomain_hops);
  CHECK(r.idtr == doctest::Approx(static_cast<double>(res.trace.online_interdomain_hops) / 3600.0));
  CHECK(populated_as_count(res.trace) == 37);
  CHECK(r.idtr >= 1.0);

  std::uint64_t weighted = 0;
  for (const auto& s : r.temporal_series) weighted += s.weighted_transfers;
  CHECK(weighted == r.total_interdomain_block_hops);
  std::uint64_t uploads = 0;
  for (auto u : r.upload_histogram.counts) uploads += u;
  CHECK(uploads == res.trace.transfers.size());

  // 5-bin moving average falls off after its peak and stays below it.
  std::vector<double> ma;
  const auto& s = r.temporal_series;
  for (std::size_t i = 0; i + 5 <= s.size(); ++i) {
    double sum = 0;
    for (std::size_t j = i; j < i + 5; ++j) sum += static_cast<double>(s[j].transfers);
    ma.push_back(sum / 5);
  }
  REQUIRE(ma.size() > 10);
  auto peak = static_cast<std::size_t>(std::max_element(ma.begin(), ma.end()) - ma.begin());
  CHECK(peak + 5 < ma.size());
  std::size_t rises = 0;
  for (std::size_t i = peak + 1; i < ma.size(); ++i) rises += ma[i] > ma[i - 1] + 1e-9;
  // Eventually monotone: the tail after the last rise is non-increasing and
  // covers most of the post-peak span.
  std::size_t last_rise = peak;
  for (std::size_t i = peak + 1; i < ma.size(); ++i)
    if (ma[i] > ma[i - 1] + 1e-9) last_rise = i;
  CHECK(ma.size() - last_rise >= (ma.size() - peak) / 3);
  CHECK(ma.back() < ma[peak] / 2);
  MESSAGE("moving-average rises after the peak: " << rises);
}

}

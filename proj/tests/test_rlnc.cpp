#include <doctest.h>

#include <array>
#include <numeric>
#include <vector>

#include "lanc/error.hpp"
#include "lanc/rlnc.hpp"
#include "oracles.hpp"

using namespace lanc;
using namespace lanc::rlnc;

namespace {

std::vector<std::uint8_t> random_bytes(std::size_t len, Rng& rng) {
  std::vector<std::uint8_t> out(len);
  for (auto& b : out) b = rng.byte();
  return out;
}

std::vector<Element> unit(std::size_t n, std::size_t i) {
  std::vector<Element> v(n, 0);
  v[i] = 1;
  return v;
}

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

// Splits a padded file into its original blocks.
std::vector<std::vector<std::uint8_t>> originals(const std::vector<std::uint8_t>& file,
                                                 const FileSpec& spec) {
  std::vector<std::vector<std::uint8_t>> out(spec.n, std::vector<std::uint8_t>(spec.k, 0));
  for (std::size_t i = 0; i < file.size(); ++i) out[i / spec.k][i % spec.k] = file[i];
  return out;
}

}  // namespace

TEST_SUITE("rlnc") {

TEST_CASE("seed blocks are unit vectors over the originals") {
  Rng rng(1);
  SUBCASE("n = 1") {
    auto blocks = seed_blocks(random_bytes(8, rng), FileSpec::exact(1, 8));
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].coeffs == std::vector<Element>{1});
  }
  SUBCASE("n = 4 gives the identity") {
    auto file = random_bytes(64, rng);
    auto blocks = seed_blocks(file, FileSpec::exact(4, 16));
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(blocks[i].coeffs == unit(4, i));
      CHECK(std::equal(blocks[i].payload.begin(), blocks[i].payload.end(), file.begin() + 16 * i));
    }
  }
  SUBCASE("4 KiB round trip") {
    auto file = random_bytes(4096, rng);
    FileSpec spec = FileSpec::exact(16, 256);
    CoeffMatrix m(16, 256);
    for (const auto& b : seed_blocks(file, spec)) m.insert(b);
    CHECK(decode(m, spec) == file);
  }
  SUBCASE("short file is zero padded and truncated on decode") {
    auto file = random_bytes(50, rng);
    FileSpec spec{4, 16, 50};
    auto blocks = seed_blocks(file, spec);
    for (std::size_t i = 50 - 48; i < 16; ++i) CHECK(blocks[3].payload[i] == 0);
    CoeffMatrix m(4, 16);
    for (const auto& b : blocks) m.insert(b);
    CHECK(decode(m, spec) == file);
  }
  SUBCASE("errors") {
    std::vector<std::uint8_t> empty;
    CHECK(code_of([&] { seed_blocks(empty, FileSpec::exact(2, 2)); }) == ErrorCode::EmptyFile);
    auto big = random_bytes(9, rng);
    CHECK(code_of([&] { seed_blocks(big, FileSpec::exact(2, 4)); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("local coefficients") {
  Rng rng(7);
  SUBCASE("m = 1 is never zero") {
    for (int i = 0; i < 10000; ++i) {
      auto c = draw_local_coeffs(1, rng);
      REQUIRE(c.values.size() == 1);
      REQUIRE(c.values[0] != 0);
    }
  }
  SUBCASE("fixed seed reproduces the vector") {
    Rng a(99), b(99);
    CHECK(draw_local_coeffs(12, a).values == draw_local_coeffs(12, b).values);
  }
  SUBCASE("values are uniform (chi-squared over 10^6 draws)") {
    std::array<double, 256> counts{};
    Rng r(12345);
    const int per = 8;
    const int draws = 1000000 / per;
    for (int i = 0; i < draws; ++i)
      for (auto v : draw_local_coeffs(per, r).values) counts[v] += 1;
    double expected = static_cast<double>(draws * per) / 256.0;
    double chi2 = 0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 255 degrees of freedom; 330.5 is the 0.999 quantile.
    CHECK(chi2 < 330.5);
  }
}

TEST_CASE("encode") {
  Rng rng(3);
  FileSpec spec = FileSpec::exact(6, 32);
  auto file = random_bytes(spec.padded_size(), rng);
  auto seeds = seed_blocks(file, spec);
  auto xs = originals(file, spec);

  SUBCASE("identity combination returns the input") {
    std::vector<CodedBlock> one = {seeds[2]};
    CHECK(encode(one, LocalCoeffs{{1}}) == seeds[2]);
  }
  SUBCASE("two seed blocks give (c1, c2, 0, ...)") {
    std::vector<CodedBlock> two = {seeds[0], seeds[1]};
    auto b = encode(two, LocalCoeffs{{0x35, 0xC1}});
    CHECK(b.coeffs == std::vector<Element>{0x35, 0xC1, 0, 0, 0, 0});
  }
  SUBCASE("payload matches the originals through the global coefficients") {
    std::vector<CodedBlock> buffer;
    for (int i = 0; i < 5; ++i) buffer.push_back(encode(seeds, draw_local_coeffs(6, rng)));
    for (int trial = 0; trial < 50; ++trial) {
      auto b = encode(buffer, draw_local_coeffs(buffer.size(), rng));
      REQUIRE(b.payload == oracle::combine(b.coeffs, xs));
      buffer[trial % buffer.size()] = b;
    }
  }
  SUBCASE("m = 1 keeps the support of the input scaled by c1") {
    auto src = encode(seeds, draw_local_coeffs(6, rng));
    std::vector<CodedBlock> one = {src};
    auto b = encode(one, LocalCoeffs{{0x1B}});
    for (std::size_t i = 0; i < 6; ++i) CHECK(b.coeffs[i] == oracle::gf_mul(0x1B, src.coeffs[i]));
  }
  SUBCASE("errors") {
    std::vector<CodedBlock> none;
    CHECK(code_of([&] { encode(none, LocalCoeffs{{1}}); }) == ErrorCode::EmptyInput);
    CHECK(code_of([&] { encode(seeds, LocalCoeffs{{1, 2}}); }) == ErrorCode::ShapeMismatch);
    std::vector<CodedBlock> mixed = {seeds[0], seed_blocks(file, FileSpec::exact(12, 16))[0]};
    CHECK(code_of([&] { encode(mixed, LocalCoeffs{{1, 1}}); }) == ErrorCode::ShapeMismatch);
    std::vector<std::size_t> picks = {0, 9};
    std::vector<Element> cs = {1, 1};
    CHECK(code_of([&] { encode(seeds, picks, cs); }) == ErrorCode::UnknownBlock);
  }
}

TEST_CASE("incremental elimination") {
  Rng rng(11);
  const std::size_t n = 10;
  SUBCASE("first insert is accepted") {
    CoeffMatrix m(n);
    auto v = unit(n, 4);
    v[7] = 9;
    CHECK(m.insert(v));
    CHECK(m.rank() == 1);
  }
  SUBCASE("scalar multiple is rejected") {
    CoeffMatrix m(n);
    std::vector<Element> v(n);
    for (auto& x : v) x = rng.byte();
    v[0] = 1;
    CHECK(m.insert(v));
    std::vector<Element> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = oracle::gf_mul(0x4E, v[i]);
    CHECK_FALSE(m.insert(w));
    CHECK(m.rank() == 1);
  }
  SUBCASE("rank matches a from-scratch elimination; rows stay reduced") {
    for (int trial = 0; trial < 40; ++trial) {
      CoeffMatrix m(n);
      std::vector<std::vector<Element>> rows;
      std::size_t count = 3 + rng.below(12);
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<Element> v(n, 0);
        // Sparse rows make dependencies likely.
        for (auto& x : v) x = rng.below(3) == 0 ? rng.byte() : 0;
        rows.push_back(v);
        bool before = oracle::rank(rows) > m.rank();
        REQUIRE(m.insert(v) == before);
        REQUIRE(m.rank() == oracle::rank(rows));
      }
      for (std::size_t r = 0; r < m.rank(); ++r) {
        auto piv = m.pivot(r);
        REQUIRE(m.row(r)[piv] == 1);
        REQUIRE(m.row_of_pivot(piv) == static_cast<long>(r));
        for (std::size_t o = 0; o < m.rank(); ++o)
          if (o != r) REQUIRE(m.row(o)[piv] == 0);
      }
    }
  }
  SUBCASE("payloads are reduced with their rows") {
    FileSpec spec = FileSpec::exact(n, 24);
    auto file = random_bytes(spec.padded_size(), rng);
    auto seeds = seed_blocks(file, spec);
    auto xs = originals(file, spec);
    CoeffMatrix m(n, spec.k);
    for (int i = 0; i < 7; ++i) m.insert(encode(seeds, draw_local_coeffs(n, rng)));
    for (std::size_t r = 0; r < m.rank(); ++r) {
      std::vector<Element> g(m.row(r).begin(), m.row(r).end());
      std::vector<Element> p(m.payload(r).begin(), m.payload(r).end());
      CHECK(p == oracle::combine(g, xs));
    }
  }
  SUBCASE("dimension and shape errors") {
    CoeffMatrix m(n, 4);
    std::vector<Element> v(n + 1, 1);
    CHECK(code_of([&] { m.insert(v); }) == ErrorCode::DimensionMismatch);
    CodedBlock b{std::vector<Element>(n, 1), std::vector<Element>(5, 0)};
    CHECK(code_of([&] { m.insert(b); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("innovative count and pivots") {
  Rng rng(21);
  SUBCASE("motivating example: i holds a, j holds a..d") {
    CoeffMatrix i(4), j(4);
    i.insert(unit(4, 0));
    for (std::size_t b = 0; b < 4; ++b) j.insert(unit(4, b));
    CHECK(innovative_count(i, j) == 3);
    auto piv = innovative_pivots(i, j);
    CHECK(piv.size() == 3);
  }
  SUBCASE("empty requester") {
    CoeffMatrix i(6), j(6);
    for (int b = 0; b < 4; ++b) {
      std::vector<Element> v(6);
      for (auto& x : v) x = rng.byte();
      j.insert(v);
    }
    CHECK(innovative_count(i, j) == j.rank());
    CHECK(innovative_pivots(i, j).size() == j.rank());
  }
  SUBCASE("subset span gives zero") {
    CoeffMatrix i(6), j(6);
    std::vector<std::vector<Element>> rows;
    for (int b = 0; b < 5; ++b) {
      std::vector<Element> v(6);
      for (auto& x : v) x = rng.byte();
      i.insert(v);
      rows.push_back(v);
    }
    std::vector<Element> mix(6, 0);
    for (const auto& r : rows)
      for (std::size_t c = 0; c < 6; ++c) mix[c] ^= oracle::gf_mul(0x33, r[c]);
    j.insert(mix);
    CHECK(innovative_count(i, j) == 0);
    CHECK(innovative_pivots(i, j).empty());
    CHECK(innovative_count(i, i) == 0);
  }
  SUBCASE("random pairs agree with the stacked-rank oracle") {
    for (int trial = 0; trial < 60; ++trial) {
      std::size_t n = 2 + rng.below(10);
      CoeffMatrix i(n), j(n);
      std::vector<std::vector<Element>> ri, rj;
      for (std::size_t t = rng.below(n + 1); t > 0; --t) {
        std::vector<Element> v(n);
        for (auto& x : v) x = rng.below(2) ? rng.byte() : 0;
        ri.push_back(v);
        i.insert(v);
      }
      std::vector<CodedBlock> buffer;
      for (std::size_t t = rng.below(n + 1); t > 0; --t) {
        std::vector<Element> v(n);
        // Reuse requester rows sometimes so overlap is common.
        if (!ri.empty() && rng.below(2)) {
          v = ri[rng.below(ri.size())];
        } else {
          for (auto& x : v) x = rng.below(2) ? rng.byte() : 0;
        }
        rj.push_back(v);
        j.insert(v);
        buffer.push_back({v, {}});
      }
      auto both = ri;
      both.insert(both.end(), rj.begin(), rj.end());
      std::size_t r = innovative_count(i, j);
      REQUIRE(r == oracle::rank(both) - oracle::rank(ri));
      REQUIRE(r <= j.rank());

      auto piv = innovative_pivots(i, buffer);
      if (r == 0) REQUIRE(piv.empty());
      REQUIRE(piv.size() >= r);
      for (auto p : piv) REQUIRE(i.is_innovative(buffer[p].coeffs));

      rlnc::JointSpan span(n);
      for (const auto& v : ri) span.insert(v);
      for (const auto& v : rj) span.insert(v);
      REQUIRE(span.dim() == oracle::rank(both));
    }
  }
  SUBCASE("dimension mismatch") {
    CoeffMatrix a(3), b(4);
    CHECK(code_of([&] { innovative_count(a, b); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { innovative_pivots(a, b); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("joint span releases rows when full and stays exact") {
  Rng rng(8);
  rlnc::JointSpan span(5);
  std::vector<std::vector<Element>> rows;
  for (int i = 0; i < 30; ++i) {
    std::vector<Element> v(5);
    for (auto& x : v) x = rng.below(3) ? 0 : rng.byte();
    rows.push_back(v);
    bool grew = span.insert(v);
    REQUIRE(span.dim() == oracle::rank(rows));
    (void)grew;
  }
}

TEST_CASE("decode") {
  Rng rng(5);
  SUBCASE("rank deficiency is reported") {
    FileSpec spec = FileSpec::exact(4, 8);
    auto seeds = seed_blocks(random_bytes(32, rng), spec);
    CoeffMatrix m(4, 8);
    for (int i = 0; i < 3; ++i) m.insert(seeds[i]);
    CHECK(code_of([&] { decode(m, spec); }) == ErrorCode::RankDeficient);
  }
  SUBCASE("randomized round trips") {
    for (int trial = 0; trial < 100; ++trial) {
      std::size_t n = 2 + rng.below(63);
      std::size_t k = 16 + rng.below(4081);
      std::size_t length = n * k - rng.below(k);
      FileSpec spec{n, k, length};
      auto file = random_bytes(length, rng);
      auto seeds = seed_blocks(file, spec);
      CoeffMatrix m(n, k);
      while (!m.full()) m.insert(encode(seeds, draw_local_coeffs(n, rng)));
      REQUIRE(decode(m, spec) == file);
    }
  }
  SUBCASE("recoded blocks from a partial relay still decode") {
    FileSpec spec = FileSpec::exact(8, 40);
    auto file = random_bytes(spec.padded_size(), rng);
    auto seeds = seed_blocks(file, spec);
    std::vector<CodedBlock> relay;
    for (int i = 0; i < 8; ++i) relay.push_back(encode(seeds, draw_local_coeffs(8, rng)));
    CoeffMatrix m(8, 40);
    while (!m.full()) m.insert(encode(relay, draw_local_coeffs(relay.size(), rng)));
    CHECK(decode(m, spec) == file);
  }
}

TEST_CASE("full-density draws to full rank stay near n") {
  Rng rng(314);
  const std::size_t n = 32;
  std::size_t total = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    CoeffMatrix m(n);
    std::size_t draws = 0;
    while (!m.full()) {
      m.insert(draw_local_coeffs(n, rng).values);
      ++draws;
    }
    total += draws;
  }
  CHECK(static_cast<double>(total) / trials <= n + 0.1);
}

TEST_CASE("operation counts") {
  auto ops = op_count_per_byte(20, 1600, 65536);
  CHECK(ops.mults_per_byte == Rational::make(20 * (65536 + 1600), 65536));
  CHECK(ops.mults_per_byte == Rational{5245, 256});
  CHECK(ops.mults_per_byte.value() == doctest::Approx(20.488).epsilon(1e-4));
  CHECK(ops.adds_per_byte == Rational::make(19 * (65536 + 1600), 65536));

  auto one = op_count_per_byte(1, 64, 256);
  CHECK(one.mults_per_byte == Rational::make(256 + 64, 256));
  CHECK(one.adds_per_byte == Rational{0, 1});

  // Doubling k scales mults/byte by (1 + n/2k) / (1 + n/k).
  auto a = op_count_per_byte(8, 100, 1000);
  auto b = op_count_per_byte(8, 100, 2000);
  CHECK(b.mults_per_byte.value() / a.mults_per_byte.value() ==
        doctest::Approx((1.0 + 100.0 / 2000.0) / (1.0 + 100.0 / 1000.0)));

  // n << k: mults/byte tends to m.
  CHECK(op_count_per_byte(7, 1, 1 << 30).mults_per_byte.value() == doctest::Approx(7.0));

  CHECK(code_of([] { op_count_per_byte(0, 1, 1); }) == ErrorCode::ValidationError);
}

}

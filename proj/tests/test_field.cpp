#include <doctest.h>

#include <vector>

#include "lanc/error.hpp"
#include "lanc/field.hpp"
#include "lanc/random.hpp"
#include "oracles.hpp"

using namespace lanc;
using gf::Element;

TEST_SUITE("field") {

TEST_CASE("multiplication table matches the shift-and-reduce oracle on every pair") {
  const auto& t = gf::tables();
  for (unsigned a = 0; a < 256; ++a)
    for (unsigned b = 0; b < 256; ++b)
      REQUIRE(t.mul[a][b] == oracle::gf_mul(static_cast<Element>(a), static_cast<Element>(b)));
}

TEST_CASE("identity, zero and commutativity") {
  const auto& t = gf::tables();
  for (unsigned x = 0; x < 256; ++x) {
    CHECK(t.mul[1][x] == x);
    CHECK(t.mul[0][x] == 0);
    CHECK(gf::mul(static_cast<Element>(x), 1) == x);
    CHECK(gf::mul(static_cast<Element>(x), 0) == 0);
    for (unsigned y = 0; y < 256; ++y) REQUIRE(t.mul[x][y] == t.mul[y][x]);
  }
}

TEST_CASE("known products and sums") {
  CHECK(gf::tables().mul[0x02][0x87] == 0x13);
  CHECK(oracle::gf_mul(0x02, 0x87) == 0x13);
  CHECK(gf::add(0x53, 0xCA) == 0x99);
  for (unsigned x = 0; x < 256; ++x) {
    auto e = static_cast<Element>(x);
    CHECK(gf::add(e, 0) == e);
    CHECK(gf::add(e, e) == 0);
  }
}

TEST_CASE("inverses") {
  CHECK(gf::inv(1) == 1);
  for (unsigned a = 1; a < 256; ++a) {
    auto e = static_cast<Element>(a);
    REQUIRE(gf::mul(e, gf::inv(e)) == 1);
    REQUIRE(gf::inv(e) == oracle::gf_inv(e));
  }
  try {
    gf::inv(0);
    FAIL("expected ZeroInverse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroInverse);
  }
}

TEST_CASE("distributivity and associativity on random triples") {
  Rng rng(2024);
  for (int i = 0; i < 20000; ++i) {
    Element a = rng.byte(), b = rng.byte(), c = rng.byte();
    REQUIRE(gf::mul(a, gf::add(b, c)) == gf::add(gf::mul(a, b), gf::mul(a, c)));
    REQUIRE(gf::mul(a, gf::mul(b, c)) == gf::mul(gf::mul(a, b), c));
  }
}

TEST_CASE("axpy_row") {
  Rng rng(5);
  std::vector<Element> dest(37), src(37);
  for (auto& x : dest) x = rng.byte();
  for (auto& x : src) x = rng.byte();
  const auto original = dest;

  SUBCASE("zero coefficient leaves dest unchanged") {
    gf::axpy_row(dest, src, 0);
    CHECK(dest == original);
  }
  SUBCASE("unit coefficient is xor") {
    gf::axpy_row(dest, src, 1);
    for (std::size_t i = 0; i < dest.size(); ++i) CHECK(dest[i] == (original[i] ^ src[i]));
  }
  SUBCASE("general coefficient matches the oracle and is an involution") {
    gf::axpy_row(dest, src, 0xA7);
    for (std::size_t i = 0; i < dest.size(); ++i)
      CHECK(dest[i] == (original[i] ^ oracle::gf_mul(0xA7, src[i])));
    gf::axpy_row(dest, src, 0xA7);
    CHECK(dest == original);
  }
  SUBCASE("length mismatch") {
    std::vector<Element> shorter(36);
    try {
      gf::axpy_row(dest, shorter, 3);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LengthMismatch);
    }
  }
}

TEST_CASE("scale_row") {
  std::vector<Element> row = {0, 1, 2, 0x87, 0xFF};
  auto copy = row;
  gf::scale_row(row, 2);
  for (std::size_t i = 0; i < row.size(); ++i) CHECK(row[i] == oracle::gf_mul(2, copy[i]));
}

}

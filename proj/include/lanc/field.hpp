#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lanc::gf {

/// GF(2^8) element. All byte values are valid.
using Element = std::uint8_t;

/// x^8 + x^4 + x^3 + x^2 + 1. Primitive, so x generates the multiplicative group.
inline constexpr unsigned kPolynomial = 0x11D;

/// Full 256x256 product table plus inverses. inv[0] is unused and left 0.
struct FieldTables {
  std::array<std::array<Element, 256>, 256> mul;
  std::array<Element, 256> inv;
};

/// Builds the tables from the powers of the generator x.
FieldTables build_tables();

/// Process-wide immutable tables, built on first use.
const FieldTables& tables();

constexpr Element add(Element a, Element b) { return a ^ b; }

inline Element mul(Element a, Element b) { return tables().mul[a][b]; }

/// Throws Error{ZeroInverse} for 0.
Element inv(Element a);

/// dest[i] += coeff * src[i]. Throws Error{LengthMismatch} on size mismatch.
void axpy_row(std::span<Element> dest, std::span<const Element> src, Element coeff);

/// dest[i] = coeff * dest[i].
void scale_row(std::span<Element> dest, Element coeff);

namespace detail {
// Unchecked axpy over [0, len) for hot loops.
inline void axpy(Element* dest, const Element* src, std::size_t len, Element coeff) {
  if (coeff == 0) return;
  if (coeff == 1) {
    for (std::size_t i = 0; i < len; ++i) dest[i] ^= src[i];
    return;
  }
  const Element* row = tables().mul[coeff].data();
  for (std::size_t i = 0; i < len; ++i) dest[i] ^= row[src[i]];
}
}  // namespace detail

}  // namespace lanc::gf

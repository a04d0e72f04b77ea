#include "lanc/field.hpp"

#include <string>

#include "lanc/error.hpp"

namespace lanc::gf {

FieldTables build_tables() {
  FieldTables t{};
  std::array<Element, 255> exp{};
  std::array<int, 256> log{};
  unsigned x = 1;
  for (int i = 0; i < 255; ++i) {
    exp[i] = static_cast<Element>(x);
    log[x] = i;
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  for (unsigned a = 1; a < 256; ++a) {
    for (unsigned b = 1; b < 256; ++b) {
      t.mul[a][b] = exp[(log[a] + log[b]) % 255];
    }
    t.inv[a] = exp[(255 - log[a]) % 255];
  }
  return t;
}

const FieldTables& tables() {
  static const FieldTables t = build_tables();
  return t;
}

Element inv(Element a) {
  if (a == 0) fail(ErrorCode::ZeroInverse, "0 has no multiplicative inverse");
  return tables().inv[a];
}

void axpy_row(std::span<Element> dest, std::span<const Element> src, Element coeff) {
  if (dest.size() != src.size()) {
    fail(ErrorCode::LengthMismatch,
         "axpy_row: dest has " + std::to_string(dest.size()) + " elements, src has " +
             std::to_string(src.size()));
  }
  detail::axpy(dest.data(), src.data(), dest.size(), coeff);
}

void scale_row(std::span<Element> dest, Element coeff) {
  const Element* row = tables().mul[coeff].data();
  for (auto& d : dest) d = row[d];
}

}  // namespace lanc::gf

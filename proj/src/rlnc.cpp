#include "lanc/rlnc.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lanc/error.hpp"

namespace lanc::rlnc {

using gf::detail::axpy;

CoeffMatrix::CoeffMatrix(std::size_t n, std::size_t k)
    : n_(n), k_(k), row_of_col_(n, -1) {
  if (n == 0) fail(ErrorCode::ShapeMismatch, "coefficient matrix needs n >= 1");
}

void CoeffMatrix::reduce(std::span<Element> coeffs) const {
  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    Element f = coeffs[pivots_[r]];
    if (f != 0) axpy(coeffs.data(), &coeffs_[r * n_], n_, f);
  }
}

bool CoeffMatrix::is_innovative(std::span<const Element> coeffs) const {
  if (coeffs.size() != n_) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_) + " coefficients, got " +
                                           std::to_string(coeffs.size()));
  }
  if (full()) return false;
  std::vector<Element> v(coeffs.begin(), coeffs.end());
  reduce(v);
  return std::any_of(v.begin(), v.end(), [](Element e) { return e != 0; });
}

bool CoeffMatrix::insert(const CodedBlock& block) {
  if (block.coeffs.size() != n_) {
    fail(ErrorCode::DimensionMismatch, "block has " + std::to_string(block.coeffs.size()) +
                                           " coefficients, matrix has n = " + std::to_string(n_));
  }
  if (k_ != 0 && block.payload.size() != k_) {
    fail(ErrorCode::ShapeMismatch, "block payload has " + std::to_string(block.payload.size()) +
                                       " bytes, expected " + std::to_string(k_));
  }
  if (full()) return false;
  return insert_impl(block.coeffs, k_ ? block.payload : std::vector<Element>{});
}

bool CoeffMatrix::insert(std::span<const Element> coeffs) {
  if (coeffs.size() != n_) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_) + " coefficients, got " +
                                           std::to_string(coeffs.size()));
  }
  if (full()) return false;
  return insert_impl({coeffs.begin(), coeffs.end()}, std::vector<Element>(k_, 0));
}

bool CoeffMatrix::insert_impl(std::vector<Element> v, std::vector<Element> p) {
  if (k_ != 0 && p.size() != k_) p.resize(k_, 0);
  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    Element f = v[pivots_[r]];
    if (f == 0) continue;
    axpy(v.data(), &coeffs_[r * n_], n_, f);
    if (k_) axpy(p.data(), &payloads_[r * k_], k_, f);
  }
  auto it = std::find_if(v.begin(), v.end(), [](Element e) { return e != 0; });
  if (it == v.end()) return false;

  auto pivot = static_cast<std::size_t>(it - v.begin());
  Element scale = gf::inv(*it);
  gf::scale_row(v, scale);
  if (k_) gf::scale_row(p, scale);

  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    Element f = coeffs_[r * n_ + pivot];
    if (f == 0) continue;
    axpy(&coeffs_[r * n_], v.data(), n_, f);
    if (k_) axpy(&payloads_[r * k_], p.data(), k_, f);
  }
  coeffs_.insert(coeffs_.end(), v.begin(), v.end());
  if (k_) payloads_.insert(payloads_.end(), p.begin(), p.end());
  row_of_col_[pivot] = static_cast<long>(pivots_.size());
  pivots_.push_back(pivot);
  return true;
}

std::vector<CodedBlock> seed_blocks(std::span<const std::uint8_t> file, const FileSpec& spec) {
  if (file.empty()) fail(ErrorCode::EmptyFile, "cannot seed an empty file");
  if (spec.n == 0 || spec.k == 0) fail(ErrorCode::ShapeMismatch, "n and k must be >= 1");
  if (file.size() > spec.padded_size()) {
    fail(ErrorCode::ShapeMismatch, "file of " + std::to_string(file.size()) +
                                       " bytes exceeds n*k = " +
                                       std::to_string(spec.padded_size()));
  }
  std::vector<CodedBlock> blocks(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto& b = blocks[i];
    b.coeffs.assign(spec.n, 0);
    b.coeffs[i] = 1;
    b.payload.assign(spec.k, 0);
    std::size_t begin = i * spec.k;
    if (begin < file.size()) {
      std::size_t len = std::min(spec.k, file.size() - begin);
      std::copy_n(file.begin() + static_cast<std::ptrdiff_t>(begin), len, b.payload.begin());
    }
  }
  return blocks;
}

LocalCoeffs draw_local_coeffs(std::size_t m, Rng& rng) {
  LocalCoeffs c;
  c.values.resize(m);
  if (m == 0) return c;
  for (;;) {
    bool nonzero = false;
    for (auto& v : c.values) {
      v = rng.byte();
      nonzero |= v != 0;
    }
    if (nonzero) return c;
  }
}

CodedBlock encode(std::span<const CodedBlock> buffer, std::span<const std::size_t> picks,
                  std::span<const Element> coeffs) {
  if (picks.empty()) fail(ErrorCode::EmptyInput, "encode needs at least one block");
  if (picks.size() != coeffs.size()) {
    fail(ErrorCode::ShapeMismatch, std::to_string(picks.size()) + " blocks but " +
                                       std::to_string(coeffs.size()) + " coefficients");
  }
  for (auto i : picks) {
    if (i >= buffer.size()) fail(ErrorCode::UnknownBlock, "block index " + std::to_string(i));
  }
  const auto& first = buffer[picks[0]];
  std::size_t n = first.coeffs.size();
  std::size_t k = first.payload.size();
  CodedBlock out;
  out.coeffs.assign(n, 0);
  out.payload.assign(k, 0);
  for (std::size_t j = 0; j < picks.size(); ++j) {
    const auto& b = buffer[picks[j]];
    if (b.coeffs.size() != n || b.payload.size() != k) {
      fail(ErrorCode::ShapeMismatch, "blocks disagree on n or k");
    }
    axpy(out.coeffs.data(), b.coeffs.data(), n, coeffs[j]);
    axpy(out.payload.data(), b.payload.data(), k, coeffs[j]);
  }
  return out;
}

CodedBlock encode(std::span<const CodedBlock> blocks, const LocalCoeffs& coeffs) {
  if (blocks.empty()) fail(ErrorCode::EmptyInput, "encode needs at least one block");
  std::vector<std::size_t> picks(blocks.size());
  std::iota(picks.begin(), picks.end(), 0);
  return encode(blocks, picks, coeffs.values);
}

std::size_t innovative_count(const CoeffMatrix& mine, const CoeffMatrix& theirs) {
  if (mine.n() != theirs.n()) {
    fail(ErrorCode::DimensionMismatch, "matrices over n = " + std::to_string(mine.n()) +
                                           " and n = " + std::to_string(theirs.n()));
  }
  CoeffMatrix joint(mine.n());
  for (std::size_t r = 0; r < mine.rank(); ++r) joint.insert(mine.row(r));
  std::size_t added = 0;
  for (std::size_t r = 0; r < theirs.rank(); ++r) added += joint.insert(theirs.row(r)) ? 1 : 0;
  return added;
}

std::vector<std::size_t> innovative_pivots(const CoeffMatrix& mine, const CoeffMatrix& theirs) {
  if (mine.n() != theirs.n()) {
    fail(ErrorCode::DimensionMismatch, "matrices over n = " + std::to_string(mine.n()) +
                                           " and n = " + std::to_string(theirs.n()));
  }
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < theirs.rank(); ++r) {
    if (mine.is_innovative(theirs.row(r))) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> innovative_pivots(const CoeffMatrix& mine,
                                           std::span<const CodedBlock> theirs) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < theirs.size(); ++r) {
    if (mine.is_innovative(theirs[r].coeffs)) out.push_back(r);
  }
  return out;
}

std::vector<std::uint8_t> decode(const CoeffMatrix& matrix, const FileSpec& spec) {
  if (matrix.n() != spec.n || matrix.k() != spec.k) {
    fail(ErrorCode::ShapeMismatch, "matrix shape does not match file layout");
  }
  if (!matrix.full()) {
    fail(ErrorCode::RankDeficient, "rank " + std::to_string(matrix.rank()) + " < n = " +
                                       std::to_string(matrix.n()));
  }
  std::vector<std::uint8_t> out(spec.padded_size());
  for (std::size_t c = 0; c < spec.n; ++c) {
    auto p = matrix.payload(static_cast<std::size_t>(matrix.row_of_pivot(c)));
    std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(c * spec.k));
  }
  out.resize(spec.length);
  return out;
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  auto g = std::gcd(num, den);
  if (g == 0) g = 1;
  return {num / g, den / g};
}

Rational operator+(Rational a, Rational b) {
  return Rational::make(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator*(Rational a, Rational b) {
  return Rational::make(a.num * b.num, a.den * b.den);
}

OpCount op_count_per_byte(std::int64_t m, std::int64_t n, std::int64_t k) {
  if (m < 1 || n < 1 || k < 1) {
    fail(ErrorCode::ValidationError, "op_count_per_byte needs m, n, k >= 1");
  }
  Rational overhead = Rational::make(k + n, k);
  return {Rational::make(m, 1) * overhead, Rational::make(m - 1, 1) * overhead};
}

JointSpan::JointSpan(std::size_t n) : n_(n), row_of_col_(n, -1) {}

bool JointSpan::insert(std::span<const Element> coeffs) {
  if (full()) return false;
  if (rows_.empty()) {
    rows_.assign(n_ * n_, 0);
    scratch_.resize(n_);
  }
  std::copy(coeffs.begin(), coeffs.end(), scratch_.begin());
  Element* v = scratch_.data();
  for (std::size_t c = 0; c < n_; ++c) {
    if (v[c] == 0) continue;
    if (row_of_col_[c] >= 0) {
      axpy(v + c, &rows_[c * n_ + c], n_ - c, v[c]);
      continue;
    }
    Element s = gf::inv(v[c]);
    const Element* mrow = gf::tables().mul[s].data();
    Element* dst = &rows_[c * n_];
    for (std::size_t i = c; i < n_; ++i) dst[i] = mrow[v[i]];
    row_of_col_[c] = static_cast<long>(c);
    if (++dim_ == n_) {
      std::vector<Element>().swap(rows_);
      std::vector<Element>().swap(scratch_);
    }
    return true;
  }
  return false;
}

}  // namespace lanc::rlnc

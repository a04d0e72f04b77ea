#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lanc/field.hpp"
#include "lanc/random.hpp"

namespace lanc::rlnc {

using gf::Element;

/// A file of `length` bytes split into n blocks of k bytes. The last block is
/// zero-padded when length < n * k.
struct FileSpec {
  std::size_t n = 1;
  std::size_t k = 1;
  std::size_t length = 1;

  static FileSpec exact(std::size_t n, std::size_t k) { return {n, k, n * k}; }
  std::size_t padded_size() const { return n * k; }
};

/// A coded block: payload = sum_i coeffs[i] * x_i over the original blocks.
struct CodedBlock {
  std::vector<Element> coeffs;
  std::vector<Element> payload;

  friend bool operator==(const CodedBlock&, const CodedBlock&) = default;
};

/// Local encoding coefficients c_1..c_m; never all zero.
struct LocalCoeffs {
  std::vector<Element> values;
};

/// Coefficient rows kept in reduced row echelon form, with the payload of
/// each row reduced alongside it. Rows are stored in insertion order; each
/// row has a unique pivot column that is 1 in that row and 0 in every other.
class CoeffMatrix {
 public:
  /// k == 0 makes a coefficient-only matrix; payloads are then ignored.
  explicit CoeffMatrix(std::size_t n, std::size_t k = 0);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t rank() const { return pivots_.size(); }
  bool full() const { return rank() == n_; }

  /// Adds the block if it increases the rank. Returns whether it did.
  bool insert(const CodedBlock& block);
  bool insert(std::span<const Element> coeffs);

  /// Eliminates `coeffs` against every pivot in place. The result is zero
  /// iff the input lies in the row span.
  void reduce(std::span<Element> coeffs) const;

  bool is_innovative(std::span<const Element> coeffs) const;

  std::span<const Element> row(std::size_t i) const { return {&coeffs_[i * n_], n_}; }
  std::span<const Element> payload(std::size_t i) const { return {&payloads_[i * k_], k_}; }
  std::size_t pivot(std::size_t i) const { return pivots_[i]; }
  /// Row index owning column c as its pivot, or -1.
  long row_of_pivot(std::size_t c) const { return row_of_col_[c]; }

 private:
  bool insert_impl(std::vector<Element> coeffs, std::vector<Element> payload);

  std::size_t n_;
  std::size_t k_;
  std::vector<Element> coeffs_;
  std::vector<Element> payloads_;
  std::vector<std::size_t> pivots_;
  std::vector<long> row_of_col_;
};

/// Trivially coded originals: block i has coeffs e_i and payload x_i.
/// Throws EmptyFile for empty input, ShapeMismatch if longer than n * k.
std::vector<CodedBlock> seed_blocks(std::span<const std::uint8_t> file, const FileSpec& spec);

/// m values uniform on [0, 255], redrawn while all zero.
LocalCoeffs draw_local_coeffs(std::size_t m, Rng& rng);

/// b = sum_j c_j * b_j, with the global coefficients combined the same way.
CodedBlock encode(std::span<const CodedBlock> blocks, const LocalCoeffs& coeffs);

/// Same as above over buffer[picks[j]], avoiding copies of the buffer.
CodedBlock encode(std::span<const CodedBlock> buffer, std::span<const std::size_t> picks,
                  std::span<const Element> coeffs);

/// r = rank([A_i; A_j]) - rank(A_i).
std::size_t innovative_count(const CoeffMatrix& mine, const CoeffMatrix& theirs);

/// Indices of `theirs` rows that stay nonzero after elimination against `mine`.
std::vector<std::size_t> innovative_pivots(const CoeffMatrix& mine, const CoeffMatrix& theirs);
std::vector<std::size_t> innovative_pivots(const CoeffMatrix& mine,
                                           std::span<const CodedBlock> theirs);

/// Reads the originals out of a full-rank matrix and truncates to spec.length.
/// Throws RankDeficient below full rank.
std::vector<std::uint8_t> decode(const CoeffMatrix& matrix, const FileSpec& spec);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend Rational operator+(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
};

struct OpCount {
  Rational mults_per_byte;
  Rational adds_per_byte;
};

/// Producing one coded block costs m(k + n) multiplications and
/// (m - 1)(k + n) additions; this returns both per payload byte.
OpCount op_count_per_byte(std::int64_t m, std::int64_t n, std::int64_t k);

/// Incrementally tracks dim(span(A) + span(B)) for two peers' coefficient
/// spaces, so that r = dim - rank(A) is available in O(1) per query.
/// Rows are kept in (unreduced) echelon form and released once full.
class JointSpan {
 public:
  explicit JointSpan(std::size_t n);

  std::size_t dim() const { return dim_; }
  bool full() const { return dim_ == n_; }
  bool insert(std::span<const Element> coeffs);

 private:
  std::size_t n_;
  std::size_t dim_ = 0;
  std::vector<Element> rows_;
  std::vector<long> row_of_col_;
  std::vector<Element> scratch_;
};

}  // namespace lanc::rlnc

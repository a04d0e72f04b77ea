#pragma once

#include <cstdint>
#include <iterator>
#include <random>
#include <utility>

namespace lanc {

// splitmix64 finalizer; used to derive independent stream seeds from one
// run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded generator with implementation-independent draws. The standard
// distributions are implementation-defined, so bounded integers and reals
// are derived here directly from mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);

  // Uniform real in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint8_t byte() { return static_cast<std::uint8_t>(next() >> 56); }

  template <typename It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(std::distance(first, last));
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      using std::swap;
      swap(first[static_cast<std::ptrdiff_t>(i - 1)],
           first[static_cast<std::ptrdiff_t>(j)]);
    }
  }

  template <typename Container>
  auto& pick(Container& c) {
    return c[static_cast<std::size_t>(below(c.size()))];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lanc

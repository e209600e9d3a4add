#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace singlet {

/// SplitMix64 finalizer. Used to expand seeds and to derive substream keys.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Combines a seed with a counter into a decorrelated 64-bit key.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane = 0) noexcept;

/// Seeded xoshiro256** generator.
///
/// Every random quantity in the library is drawn from a Stream so that results
/// depend only on explicit seeds. Conversions to doubles and integers are done
/// here rather than through <random> distributions, whose output is not fixed
/// by the standard and differs between library vendors.
///
/// A Stream is single-owner: never share one between concurrent tasks, derive
/// a substream with for_counter() instead.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) noexcept;

  /// Counter-based substream: a fresh generator keyed by (seed, counter, lane).
  static Stream for_counter(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane = 0) noexcept {
    return Stream(derive_seed(seed, counter, lane));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  result_type next() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// True with probability p (p clamped to [0, 1]).
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) noexcept;

  /// Discards k outputs.
  void discard(std::uint64_t k) noexcept;

 private:
  std::uint64_t s_[4];
};

}  // namespace singlet

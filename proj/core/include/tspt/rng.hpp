#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace tspt {

/// SplitMix64 finalizer; full-avalanche mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Collapses (seed, tag, index, ...) into a single substream key. Every
/// replication / generator / permutation stream in the project derives its key
/// through this function, which keeps parallel runs schedule-independent.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) noexcept;

/// Philox4x32-10 block function: 128-bit counter, 64-bit key, 128-bit output.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based stream over Philox blocks. Instances with distinct
/// (key, stream) pairs produce statistically independent sequences, and a
/// given pair always reproduces the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t key, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double();

  /// Standard normal via Box-Muller on the uniform stream.
  double next_gaussian();

  /// Uniform on {0, ..., bound - 1} without modulo bias. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  /// In-place Fisher-Yates shuffle.
  void shuffle(std::span<int> values);

  void fill_gaussian(std::span<double> out);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_u32_ = 0;
  double spare_gaussian_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tspt

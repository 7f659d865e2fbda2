#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace suprec {

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator and
/// supports a 2^128 jump for manual stream splitting.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Advance by 2^128 draws.
  void jump() noexcept;

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  std::array<std::uint64_t, 4> s_{};
};

using Rng = Xoshiro256pp;

/// SplitMix64 finalizer; used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// What a substream is used for. Distinct purposes never share draws.
enum class StreamPurpose : std::uint64_t {
  Support = 1,
  Signal = 2,
  Measurement = 3,
  Noise = 4,
  Probe = 5,
  Auxiliary = 6,
};

/// Seed of the substream (master, trial, sample, purpose). Pure function.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          std::uint64_t sample, StreamPurpose purpose) noexcept;

/// The family of substreams belonging to one trial of one experiment.
/// Copyable, immutable; safe to share between threads.
class TrialStreams {
 public:
  TrialStreams(std::uint64_t master_seed, std::uint64_t trial) noexcept
      : master_(master_seed), trial_(trial) {}

  [[nodiscard]] Rng support() const noexcept;
  [[nodiscard]] Rng sample(std::uint64_t index, StreamPurpose purpose) const noexcept;

  [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_; }
  [[nodiscard]] std::uint64_t trial() const noexcept { return trial_; }
  /// A single 64-bit fingerprint of (master, trial), reported with results.
  [[nodiscard]] std::uint64_t fingerprint() const noexcept;

 private:
  std::uint64_t master_;
  std::uint64_t trial_;
};

}  // namespace suprec

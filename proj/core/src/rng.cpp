#include "suprec/rng.hpp"

namespace suprec {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) noexcept {
  std::uint64_t z = seed;
  for (auto& word : s_) {
    word = splitmix64(z);
    z += 0x9e3779b97f4a7c15ULL;
  }
  // The all-zero state is a fixed point; splitmix64 output cannot produce
  // four zeros in a row, but keep the guard explicit.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Xoshiro256pp::result_type Xoshiro256pp::operator()() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

void Xoshiro256pp::jump() noexcept {
  static constexpr std::array<std::uint64_t, 4> kJump = {
      0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
      0x39abdc4529b1661cULL};
  std::array<std::uint64_t, 4> acc{};
  for (std::uint64_t word : kJump) {
    for (int b = 0; b < 64; ++b) {
      if (word & (std::uint64_t{1} << b)) {
        for (int j = 0; j < 4; ++j) acc[j] ^= s_[j];
      }
      (*this)();
    }
  }
  s_ = acc;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          std::uint64_t sample, StreamPurpose purpose) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(sample + 0x8cb92ba72f3d8dd7ULL));
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

Rng TrialStreams::support() const noexcept {
  return Rng(derive_seed(master_, trial_, 0, StreamPurpose::Support));
}

Rng TrialStreams::sample(std::uint64_t index, StreamPurpose purpose) const noexcept {
  return Rng(derive_seed(master_, trial_, index, purpose));
}

std::uint64_t TrialStreams::fingerprint() const noexcept {
  return splitmix64(splitmix64(master_) ^ trial_);
}

}  // namespace suprec

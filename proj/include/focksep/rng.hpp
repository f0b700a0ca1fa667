#pragma once

#include <cstdint>

namespace focksep::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: value(i) = mix64(key + (i+1)*golden). Streams with
// distinct keys are independent for all practical purposes, and a stream's
// output depends only on (key, counter), never on evaluation order elsewhere.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform in the open interval (0,1): 53-bit mantissa, half-ulp offset.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Domain-separation tags for derived streams.
inline constexpr std::uint64_t kTagHybridPoint = 0x48594252ULL;   // per-index modulus+angle
inline constexpr std::uint64_t kTagPoissonCount = 0x504f4953ULL;  // window count
inline constexpr std::uint64_t kTagPoissonPoint = 0x50505431ULL;  // per-point radius+angle
inline constexpr std::uint64_t kTagTrial = 0x5452494cULL;         // per-trial seed derivation
inline constexpr std::uint64_t kTagBootstrap = 0x424f4f54ULL;
inline constexpr std::uint64_t kTagGeneric = 0x47454e52ULL;

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t k = mix64(seed ^ (tag * kGolden));
  k = mix64(k ^ (a * 0xbf58476d1ce4e5b9ULL));
  k = mix64(k ^ (b * 0x94d049bb133111ebULL));
  return k;
}

inline Stream substream(std::uint64_t seed, std::uint64_t tag,
                        std::uint64_t a = 0, std::uint64_t b = 0) {
  return Stream(derive_key(seed, tag, a, b));
}

}  // namespace focksep::rng

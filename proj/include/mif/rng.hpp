#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mif {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used to derive independent
// stream seeds; the streams themselves are std::mt19937_64, whose output
// sequence is fixed by the C++ standard and therefore identical on every
// conforming platform.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-trial seed: fold base_seed, n, every byte of the probability text and
// the trial index through splitmix64, in that order.
//
//   h = splitmix64(base_seed)
//   h = splitmix64(h ^ n)
//   for byte b in p_text: h = splitmix64(h ^ b)
//   h = splitmix64(h ^ trial)
constexpr std::uint64_t mix_trial_seed(std::uint64_t base_seed, std::uint64_t n,
                                       std::string_view p_text,
                                       std::uint64_t trial) noexcept {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ n);
  for (char c : p_text) h = splitmix64(h ^ static_cast<unsigned char>(c));
  return splitmix64(h ^ trial);
}

using Engine = std::mt19937_64;

}  // namespace mif

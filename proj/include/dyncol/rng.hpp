#pragma once

#include <cstdint>

namespace dyncol::rng {

// Counter-based streams: every random decision is a pure function of
// (seed, batch, phase, a, b, vertex), so results are identical under any
// parallel schedule and under sequential execution.

enum class Phase : uint64_t {
  InitialColor = 1,
  ColorMarked = 2,
  ColorUnmarked = 3,
  RaiseSelect = 4,
  LowerSelect = 5,
  SeqRecolor = 6,
  FolkloreColor = 7,
  StaticColor = 8,
};

inline constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t draw(uint64_t seed, uint64_t batch, Phase phase, uint64_t a, uint64_t b,
                     uint64_t vertex) {
  uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ mix64(batch));
  h = mix64(h ^ mix64(static_cast<uint64_t>(phase)));
  h = mix64(h ^ mix64(a));
  h = mix64(h ^ mix64(b));
  h = mix64(h ^ mix64(vertex));
  return h;
}

// Unbiased-enough index in [0, n): Lemire reduction on a 64-bit draw.
inline uint32_t uniform_below(uint64_t key, uint32_t n) {
  return static_cast<uint32_t>((static_cast<__uint128_t>(key) * n) >> 64);
}

// Bernoulli with probability floor(2^64/denom)/2^64, i.e. 1/denom up to 2^-64 terms.
inline bool one_in(uint64_t key, uint64_t denom) { return key < (~0ULL / denom); }

}  // namespace dyncol::rng

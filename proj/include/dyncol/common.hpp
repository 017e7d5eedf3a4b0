#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dyncol {

using VertexId = uint32_t;
using ColorId = int32_t;
using Level = int32_t;

// Sentinel for uncolored vertices (chi(u) = -1).
inline constexpr ColorId kBlank = -1;

// Levels live in [kBottomLevel, lambda].
inline constexpr Level kBottomLevel = 5;

// Lowering moves a vertex down exactly this many levels, so lower-marking
// applies only at levels >= kBottomLevel + kLowerStep.
inline constexpr Level kLowerStep = 4;
inline constexpr Level kMinLowerLevel = kBottomLevel + kLowerStep;

[[noreturn]] inline void fail(const std::string& msg) { throw std::logic_error(msg); }

#define DYNCOL_CHECK(cond, msg)          \
  do {                                   \
    if (!(cond)) ::dyncol::fail((msg));  \
  } while (0)

inline constexpr int64_t pow3(int64_t e) {
  int64_t r = 1;
  while (e-- > 0) r *= 3;
  return r;
}

// Smallest e >= 0 with 3^e >= x, for x >= 1.
inline constexpr int32_t ceil_log3(int64_t x) {
  int32_t e = 0;
  int64_t p = 1;
  while (p < x) {
    p *= 3;
    ++e;
  }
  return e;
}

// Largest e >= 0 with 3^e <= x, for x >= 1.
inline constexpr int32_t floor_log3(int64_t x) {
  int32_t e = 0;
  int64_t p = 1;
  while (p * 3 <= x) {
    p *= 3;
    ++e;
  }
  return e;
}

// Level range is [5, lambda]; the clamp keeps at least two levels for small delta.
inline constexpr Level lambda_for_delta(int64_t delta) {
  return std::max<Level>(6, ceil_log3(delta));
}

}  // namespace dyncol

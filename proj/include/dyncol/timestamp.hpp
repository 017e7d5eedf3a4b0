#pragma once

#include "dyncol/common.hpp"

namespace dyncol {

// Recolor timestamp: either DET (deterministic recolor) or a (batch, level)
// pair. DET compares above every pair; pairs compare by batch index only,
// the level is payload. Equal-batch pairs compare equal; callers break ties
// by vertex id (larger id wins).
struct Timestamp {
  int32_t batch = 0;
  Level level = kBottomLevel;
  bool det = false;

  static constexpr Timestamp deterministic() { return Timestamp{0, 0, true}; }
  static constexpr Timestamp numbered(int32_t b, Level l) { return Timestamp{b, l, false}; }

  bool operator==(const Timestamp&) const = default;
};

// Total preorder: -1, 0, +1.
inline int timestamp_cmp(const Timestamp& a, const Timestamp& b) {
  if (a.det || b.det) return static_cast<int>(a.det) - static_cast<int>(b.det);
  return (a.batch > b.batch) - (a.batch < b.batch);
}

// arg max over an edge's endpoints; timestamp ties go to the larger id.
inline VertexId later_endpoint(VertexId u, const Timestamp& tu, VertexId v, const Timestamp& tv) {
  int c = timestamp_cmp(tu, tv);
  if (c != 0) return c > 0 ? u : v;
  return u > v ? u : v;
}

}  // namespace dyncol

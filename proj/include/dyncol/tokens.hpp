#pragma once

#include <cstdint>
#include <vector>

#include "dyncol/common.hpp"

namespace dyncol {

// All token arithmetic is carried out in integer sixths of a token, so the
// release-bound assertions are exact.

// Edge potential theta(u,v) = lambda - max(l(u), l(v)), in whole tokens.
inline int64_t edge_tokens_from(Level lu, Level lv, Level lambda) {
  return lambda - std::max(lu, lv);
}

// Vertex potential 6*theta(v): max(0, 3^(l-1) - |N_v(5, l-1)|) above the
// bottom level, 0 at it.
inline int64_t vertex_tokens_sixths_from(Level l, int64_t below_count) {
  if (l <= kBottomLevel) return 0;
  return std::max<int64_t>(0, pow3(l - 1) - below_count);
}

// Incrementally maintained potential Gamma with per-phase deltas for the
// current batch. gamma_sixths must match the brute-force recount at every
// barrier.
struct TokenLedger {
  int64_t gamma_sixths = 0;

  struct Entry {
    const char* phase;
    int64_t delta_sixths;
  };
  std::vector<Entry> batch_deltas;

  void bump(int64_t delta_sixths) { gamma_sixths += delta_sixths; }
  void note(const char* phase, int64_t delta_sixths) {
    batch_deltas.push_back(Entry{phase, delta_sixths});
  }
};

}  // namespace dyncol

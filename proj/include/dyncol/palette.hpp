#pragma once

#include <cstdint>
#include <vector>

#include "dyncol/common.hpp"
#include "dyncol/sorted_set.hpp"

namespace dyncol {

class GraphState;

// Per-vertex color array over {0..delta} split into a lower palette
// C_u^- = A[0:s-1] and an upper palette C_u^+ = A[s:delta].
//
// Two representations behind the same contract:
//  - dense (delta <= 1024): element array A, inverse map M and split index s,
//    rearranged by swaps. O(|B|) per batch operation.
//  - sparse: the upper set alone; the lower palette is its complement and
//    prefixes are materialized in ascending color order on demand. Keeps
//    per-vertex memory O(deg) for large palettes.
// Set-level semantics of every operation are identical across the two.
class PartitionedPalette {
 public:
  enum class Rep { Auto, Dense, Sparse };
  static constexpr int32_t kDenseMax = 1024;

  PartitionedPalette() = default;
  explicit PartitionedPalette(int32_t delta, Rep rep = Rep::Auto);

  int32_t delta() const { return delta_; }
  bool dense() const { return dense_; }
  // |C_u^-|; the split index s for the dense representation.
  int32_t lower_size() const;
  bool is_upper(ColorId c) const;

  // Moves each color of b into the upper palette. Colors already upper are
  // filtered, duplicates deduplicated. s decreases by the number moved.
  void move_up(const std::vector<ColorId>& b);
  // Mirror of move_up.
  void move_down(const std::vector<ColorId>& b);
  // Moves each color of b (filtered to the lower palette) to the back of the
  // lower slice; s unchanged.
  void rearrange_lower(const std::vector<ColorId>& b);

  // Rearranges so that the lower colors NOT in `exclude` form the prefix of
  // the lower palette; returns the prefix length. `exclude` entries outside
  // the lower palette are ignored.
  int32_t build_prefix(const std::vector<ColorId>& exclude);
  // First k prefix colors, valid immediately after build_prefix (or, for the
  // dense representation, any prefix of the lower slice).
  void copy_prefix(int32_t k, std::vector<ColorId>& out) const;

  std::vector<ColorId> upper_colors() const;  // ascending
  // Dense-only accessors (tests).
  const std::vector<ColorId>& array() const;
  const std::vector<int32_t>& positions() const;

  void check_invariants() const;

 private:
  // Filters to lower/upper slice and dedups; result ascending.
  std::vector<ColorId> filter_lower(const std::vector<ColorId>& b) const;
  std::vector<ColorId> filter_upper(const std::vector<ColorId>& b) const;
  void swap_entries(int32_t p, int32_t q);
  // Dense helper: place `b` (subset of lower, sorted) at the back of the
  // lower slice / front of the upper slice.
  void pack_lower_suffix(const std::vector<ColorId>& b);
  void pack_upper_prefix(const std::vector<ColorId>& b);

  int32_t delta_ = 0;
  bool dense_ = true;
  // dense
  std::vector<ColorId> arr_;
  std::vector<int32_t> pos_;
  int32_t split_ = 0;
  // sparse
  SortedSet upper_;
  std::vector<ColorId> prefix_exclude_;
};

// Rearranges u's lower palette so its blank colors (used by no colored vertex
// of N_u(5, l(u)-1)) form the prefix; returns their count. Requires chi(u) = BLANK.
int32_t build_blank_prefix(GraphState& g, VertexId u);

// Same with blank-or-unique colors (below multiplicity <= 1).
int32_t build_blank_unique_prefix(GraphState& g, VertexId u);

}  // namespace dyncol

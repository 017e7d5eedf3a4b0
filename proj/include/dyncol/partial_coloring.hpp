#pragma once

#include <cstdint>
#include <vector>

#include "dyncol/common.hpp"
#include "dyncol/parallel.hpp"
#include "dyncol/rng.hpp"

namespace dyncol {

// A list-coloring instance: vertices, adjacency restricted to the instance
// (by position), and a palette per vertex with |palette| >= deg + 1.
struct ColoringInstance {
  std::vector<VertexId> verts;
  std::vector<std::vector<uint32_t>> adj;  // positions into verts
  std::vector<std::vector<ColorId>> palette;

  size_t size() const { return verts.size(); }
  // Throws std::invalid_argument when the palette invariant fails.
  void validate() const;
};

struct PartialResult {
  std::vector<std::pair<VertexId, ColorId>> colored;
  ColoringInstance residual;
  // Per residual vertex: colors taken by its instance neighbors this round.
  std::vector<std::vector<ColorId>> taken;
};

struct RngCtx {
  uint64_t seed = 0;
  uint64_t batch = 0;
  rng::Phase phase = rng::Phase::StaticColor;
  uint64_t a = 0;      // level or sub-instance discriminator
  uint64_t round = 0;
};

// One round: every vertex samples uniformly from its palette and keeps the
// color iff no instance neighbor sampled the same one. The residual holds
// exactly the rejected vertices with adjacency (and palettes) restricted to
// them.
PartialResult partial_color(const ColoringInstance& inst, const RngCtx& ctx,
                            const ExecPolicy& pol, int64_t* work = nullptr);

struct StaticColoringResult {
  std::vector<std::pair<VertexId, ColorId>> assignment;
  int64_t rounds = 0;
};

// Iterates partial_color, shrinking palettes by colors taken by colored
// neighbors, until every vertex is colored. ctx.round is managed internally.
StaticColoringResult static_list_color(ColoringInstance inst, RngCtx ctx, const ExecPolicy& pol,
                                       int64_t* work = nullptr);

// Hard cap converting the whp round bound into a testable failure mode.
inline int64_t coloring_round_cap(size_t n) {
  int64_t bits = 1;
  while ((static_cast<size_t>(1) << bits) < n + 2) ++bits;
  return 64 * bits;
}

}  // namespace dyncol

#pragma once

#include <cstdint>
#include <vector>

#include "dyncol/batch_updater.hpp"
#include "dyncol/graph_state.hpp"
#include "dyncol/sorted_set.hpp"

namespace dyncol {

// ---- Folklore 2*delta baseline ---------------------------------------------
//
// Flat adjacency, palette {0 .. 2*delta-1}, recolor timestamps by batch.
// Monochromatic inserted edges blank their most recently recolored endpoint;
// the blank subgraph is list-colored from the blank palettes.

struct FolkloreState {
  uint32_t num_vertices = 0;
  int32_t delta = 0;
  uint64_t seed = 0;
  int32_t batches = 0;
  int64_t edge_count = 0;
  std::vector<SortedSet> adj;
  std::vector<ColorId> chi;     // in [0, 2*delta)
  std::vector<int32_t> tau;     // batch of last recolor

  FolkloreState(uint32_t n, int32_t delta, uint64_t seed);
  int32_t palette_size() const { return 2 * delta; }
};

struct FolkloreMetrics {
  int64_t recolored = 0;
  int64_t rounds = 0;
  int64_t work = 0;
  int64_t palette_claim_violations = 0;  // |B_u| >= deg_blank(u) + delta, checked per run
  NormalizeResult norm;
};

FolkloreMetrics folklore_batch(FolkloreState& st, const Batch& raw, const ExecPolicy& pol);

// ---- Relaxed sequential (delta+1) baseline ---------------------------------
//
// Single-edge updates on the shared GraphState. Clean vertices resample from
// B u U and recurse on unique colors; dirty vertices take the first blank
// color, get a DET timestamp and move. Conditions here are the sequential
// variant: upper threshold 3^l, lower threshold 3^(l-5) gated to levels >= 9.

struct SeqMetrics {
  int64_t recolored = 0;
  int64_t chain_depth = 0;
  int64_t moves_up = 0;
  int64_t moves_down = 0;
  int64_t work = 0;
};

bool seq_violates_upper(const GraphState& g, VertexId u);
bool seq_violates_lower(const GraphState& g, VertexId u);

// Applies one insert/delete (already validated: present/absent, degree fits).
SeqMetrics relaxed_seq_update(GraphState& g, const BatchOp& op, int32_t update_index);

// ---- Static greedy oracle ---------------------------------------------------

// First-free-color greedy in ascending id order; colors in [0, delta].
// Throws std::invalid_argument when some degree exceeds delta.
std::vector<ColorId> greedy_static(uint32_t n, int32_t delta,
                                   const std::vector<std::pair<VertexId, VertexId>>& edges);

}  // namespace dyncol

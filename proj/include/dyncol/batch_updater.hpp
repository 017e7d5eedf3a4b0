#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "dyncol/conditions.hpp"
#include "dyncol/graph_state.hpp"
#include "dyncol/parallel.hpp"

namespace dyncol {

struct BatchOp {
  bool insert = true;
  VertexId u = 0, v = 0;
  bool operator==(const BatchOp&) const = default;
};

struct Batch {
  std::vector<BatchOp> ops;
  bool operator==(const Batch&) const = default;
};

struct NormalizeResult {
  Batch batch;  // deletes first, then inserts, each sorted by (u, v)
  int64_t self_loops = 0;
  int64_t duplicates = 0;
  int64_t cancelled = 0;
  int64_t noops = 0;
  bool rejected = false;
  VertexId overflow_vertex = 0;
  std::string error;

  int64_t dropped() const { return self_loops + duplicates + cancelled + noops; }
};

enum class WorkPhase : uint8_t { Init = 0, ColorMarked, ColorUnmarked, Raise, Lower };
inline constexpr size_t kWorkPhases = 5;

struct RoundStat {
  Level level_from = 0;
  Level level_to = 0;
  int64_t eligible = 0;  // P-true set (raise) / still-violating set (lower)
  int64_t sampled = 0;
  int64_t moved = 0;
  int64_t drop_sixths = 0;      // measured ledger decrease
  int64_t required_sixths = 0;  // release bound for the moved group
};

// Appended every time a vertex receives a color.
struct RecolorRecord {
  VertexId vertex;
  int32_t batch;
  Level level;
  bool dirty;       // recolored through the marked (deterministic) path
  Level base;       // base level at recolor time
  uint8_t origin;   // 0 = blanked by an update conflict, 1 = by a unique-color chain
};

struct BatchMetrics {
  std::array<int64_t, kWorkPhases> work{};
  int64_t structural_ops = 0;
  int64_t injected_sixths = 0;
  int64_t released_sixths = 0;
  int64_t max_op_injection_sixths = std::numeric_limits<int64_t>::min();
  int64_t blank_from_updates = 0;
  int64_t blank_from_chains = 0;
  std::vector<int64_t> mrkd_u_sizes, mrkd_l_sizes, unmrkd_sizes;  // per level, post-init
  int32_t color_marked_rounds_max = 0;
  int32_t color_unmarked_rounds_max = 0;
  std::vector<RoundStat> raise_rounds, lower_rounds;
  std::vector<RecolorRecord> records;
  int64_t release_violations = 0;
  int64_t raise_unmoved_violations = 0;  // |N_u(5,i)| > 3^i for an unmoved marked vertex
  int64_t lower_requalified = 0;         // left Mrkd_L after regaining the lower condition
  std::vector<TokenLedger::Entry> ledger_deltas;
  int64_t normalize_dropped = 0;
  std::unordered_map<VertexId, uint8_t> blank_origin;

  int64_t total_work() const {
    int64_t s = 0;
    for (int64_t w : work) s += w;
    return s;
  }
  void count(WorkPhase p, int64_t amount) { work[static_cast<size_t>(p)] += amount; }
};

struct ApplyOptions {
  ExecPolicy pol{};
  // Verify ledger/invariants after every phase (tests).
  bool paranoid = false;
};

// Batch normalization: self-loops dropped, duplicates merged, insert+delete
// of one edge cancels, no-ops dropped; an insert pushing a degree past delta
// rejects the whole batch naming the vertex.
NormalizeResult normalize(const GraphState& g, const Batch& raw);

// The full update (initialization, top-down coloring, top-down raise pass,
// bottom-up lower pass). Throws std::invalid_argument on a rejected batch.
BatchMetrics apply_batch(GraphState& g, const Batch& raw, const ApplyOptions& opt = {});

// Phase entry points, driven by apply_batch and exercised directly by tests.
void init_phase(GraphState& g, const Batch& normalized, BatchMetrics& m, const ExecPolicy& pol);
void color_marked(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol);
void color_unmarked(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol);
void raise_level(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol);
void lower_level(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol);

// Blanks each vertex of xs (sorted, colored): decrements its color at all
// same-or-lower-level neighbors, sets chi = BLANK and files the vertex into
// the mark set chosen by classify. Returns the touched counter pairs; the
// caller reconciles palettes.
std::vector<std::pair<VertexId, ColorId>> uncolor_and_classify(GraphState& g,
                                                               const std::vector<VertexId>& xs,
                                                               uint8_t origin, BatchMetrics* m,
                                                               const ExecPolicy& pol);

// Restores the palette partition against final counter values for the given
// (vertex, color) pairs: mu > 0 lifts the color into C^+, mu = 0 drops it.
void reconcile_palettes(GraphState& g, std::vector<std::pair<VertexId, ColorId>> touched);

// Moves a group of vertices from level `from` up to `to` (raise) or down to
// `to` (lower), performing all adjacency, counter and palette updates, and
// returns the measured ledger drop in sixths (positive = released). Movers
// must all sit at `from`.
int64_t raise_group(GraphState& g, const std::vector<VertexId>& movers, Level from, Level to);
int64_t lower_group(GraphState& g, const std::vector<VertexId>& movers, Level from, Level to);

}  // namespace dyncol

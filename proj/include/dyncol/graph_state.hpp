#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dyncol/common.hpp"
#include "dyncol/palette.hpp"
#include "dyncol/sorted_set.hpp"
#include "dyncol/timestamp.hpp"
#include "dyncol/tokens.hpp"

namespace dyncol {

// mu_u^+(c): upper-color counters. Dense array per vertex for delta <= 1024,
// hash map above.
class CounterArray {
 public:
  CounterArray() = default;
  explicit CounterArray(int32_t delta) : dense_(delta <= PartitionedPalette::kDenseMax) {
    if (dense_) counts_.assign(static_cast<size_t>(delta) + 1, 0);
  }

  int32_t get(ColorId c) const {
    if (dense_) return counts_[static_cast<size_t>(c)];
    auto it = sparse_.find(c);
    return it == sparse_.end() ? 0 : it->second;
  }

  void add(ColorId c, int32_t d) {
    if (d == 0) return;
    if (dense_) {
      counts_[static_cast<size_t>(c)] += d;
      DYNCOL_CHECK(counts_[static_cast<size_t>(c)] >= 0, "color counter went negative");
    } else {
      int32_t& slot = sparse_[c];
      slot += d;
      DYNCOL_CHECK(slot >= 0, "color counter went negative");
      if (slot == 0) sparse_.erase(c);
    }
  }

 private:
  bool dense_ = true;
  std::vector<int32_t> counts_;
  std::unordered_map<ColorId, int32_t> sparse_;
};

struct VertexState {
  Level level = kBottomLevel;
  ColorId color = kBlank;
  Timestamp ts = Timestamp::numbered(0, kBottomLevel);
  int32_t degree = 0;
  // N_u(5, level-1): neighbors strictly below.
  SortedSet below;
  // nbr_at[i] = N_u(i) for i in [level, lambda]; slots outside stay empty.
  std::vector<SortedSet> nbr_at;
  CounterArray mu;
  PartitionedPalette palette;
};

// Dynamic delta-bounded graph with the hierarchical partition, coloring,
// palettes, counters and mark sets. Externally single-writer; phase code
// mutates per-vertex state between barriers and routes cross-vertex effects
// through the update framework.
class GraphState {
 public:
  GraphState(uint32_t n, int32_t delta, uint64_t seed);

  uint32_t n() const { return static_cast<uint32_t>(vert.size()); }
  int32_t delta() const { return delta_; }
  Level lambda() const { return lambda_; }
  uint64_t seed() const { return seed_; }

  Level level(VertexId u) const { return vert[u].level; }
  ColorId color(VertexId u) const { return vert[u].color; }
  const Timestamp& timestamp(VertexId u) const { return vert[u].ts; }
  int32_t degree(VertexId u) const { return vert[u].degree; }
  int32_t mu_plus(VertexId u, ColorId c) const { return vert[u].mu.get(c); }
  int64_t edge_count() const { return edge_count_; }

  bool has_edge(VertexId u, VertexId v) const;

  // N_u(i, j), assembled from the stored slots. Ascending id order.
  std::vector<VertexId> neighbors_in_range(VertexId u, Level i, Level j) const;
  // |N_u(5, l(u))| from stored set sizes.
  int64_t upto_level_count(VertexId u) const {
    return static_cast<int64_t>(vert[u].below.size() + vert[u].nbr_at[vert[u].level].size());
  }

  // Primitive structural mutator. Preconditions (normalized input): insert of
  // an absent edge with both degrees < delta, delete of a present edge.
  // Returns the exact ledger delta in sixths and applies it.
  int64_t apply_structural(VertexId u, VertexId v, bool insert);

  void set_color(VertexId u, ColorId c) {
    vert[u].color = c;
    chi[u] = c;
  }
  void set_level(VertexId u, Level l) {
    DYNCOL_CHECK(l >= kBottomLevel && l <= lambda_, "level out of range");
    vert[u].level = l;
  }
  void set_timestamp(VertexId u, const Timestamp& t) { vert[u].ts = t; }
  void counter_add(VertexId u, ColorId c, int32_t d) { vert[u].mu.add(c, d); }

  SortedSet& mark_set(int kind, Level i);  // 0 = Mrkd_U, 1 = Mrkd_L, 2 = Unmrkd

  // Test fixture: recolors a vertex with no incident edges (no counters or
  // palettes reference it, so every invariant is preserved).
  void recolor_isolated(VertexId u, ColorId c, std::optional<Timestamp> ts = std::nullopt);

  int32_t brute_mu(VertexId u, ColorId c) const;
  // Full structural/counters/palette consistency scan; throws on breach.
  // between_batches additionally demands a proper total coloring and empty
  // mark sets.
  void check_invariants(bool between_batches) const;

  // Iterates every edge once as (u, v) with u < v.
  template <class F>
  void for_each_edge(F&& f) const {
    for (VertexId u = 0; u < n(); ++u) {
      for (VertexId v : vert[u].below)
        if (v > u) f(u, v);
      for (Level i = kBottomLevel; i <= lambda_; ++i)
        for (VertexId v : vert[u].nbr_at[i])
          if (v > u) f(u, v);
    }
  }

  std::vector<VertexState> vert;
  std::vector<ColorId> chi;  // mirrors vert[u].color
  // Mark sets per level, index [kBottomLevel, lambda].
  std::vector<SortedSet> mrkd_u, mrkd_l, unmrkd;
  TokenLedger ledger;
  int32_t batches = 0;  // applied batches; batch 0 is the initial coloring

 private:
  int32_t delta_;
  Level lambda_;
  uint64_t seed_;
  int64_t edge_count_ = 0;
};

}  // namespace dyncol

#include "dyncol/graph_state.hpp"

#include "dyncol/rng.hpp"

namespace dyncol {

GraphState::GraphState(uint32_t n, int32_t delta, uint64_t seed)
    : delta_(delta), lambda_(lambda_for_delta(delta)), seed_(seed) {
  if (n == 0) throw std::invalid_argument("graph needs at least one vertex");
  if (delta <= 0) throw std::invalid_argument("graph needs delta >= 1");
  vert.resize(n);
  chi.resize(n);
  for (VertexId u = 0; u < n; ++u) {
    VertexState& s = vert[u];
    s.nbr_at.resize(static_cast<size_t>(lambda_) + 1);
    s.mu = CounterArray(delta_);
    s.palette = PartitionedPalette(delta_);
    // Random initial color; proper because the graph starts empty.
    uint64_t key = rng::draw(seed_, 0, rng::Phase::InitialColor, 0, 0, u);
    s.color = static_cast<ColorId>(rng::uniform_below(key, static_cast<uint32_t>(delta_) + 1));
    chi[u] = s.color;
  }
  mrkd_u.resize(static_cast<size_t>(lambda_) + 1);
  mrkd_l.resize(static_cast<size_t>(lambda_) + 1);
  unmrkd.resize(static_cast<size_t>(lambda_) + 1);
}

bool GraphState::has_edge(VertexId u, VertexId v) const {
  const VertexState& s = vert[u];
  Level lv = vert[v].level;
  if (lv < s.level) return s.below.contains(v);
  return s.nbr_at[lv].contains(v);
}

std::vector<VertexId> GraphState::neighbors_in_range(VertexId u, Level i, Level j) const {
  DYNCOL_CHECK(i <= j, "neighbors_in_range needs i <= j");
  std::vector<VertexId> out;
  const VertexState& s = vert[u];
  if (i < s.level) {
    for (VertexId v : s.below) {
      Level lv = vert[v].level;
      if (lv >= i && lv <= j) out.push_back(v);
    }
  }
  for (Level l = std::max(i, s.level); l <= std::min(j, lambda_); ++l)
    for (VertexId v : s.nbr_at[l]) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

int64_t GraphState::apply_structural(VertexId u, VertexId v, bool insert) {
  DYNCOL_CHECK(u < n() && v < n() && u != v, "bad endpoints");
  const Level lu = vert[u].level, lv = vert[v].level;
  int64_t delta_sixths = 0;

  auto vertex_delta = [&](VertexId x, int64_t below_change) {
    const VertexState& s = vert[x];
    const int64_t b = static_cast<int64_t>(s.below.size());
    return vertex_tokens_sixths_from(s.level, b + below_change) -
           vertex_tokens_sixths_from(s.level, b);
  };

  if (insert) {
    DYNCOL_CHECK(!has_edge(u, v), "duplicate insert");
    DYNCOL_CHECK(vert[u].degree < delta_ && vert[v].degree < delta_, "degree overflow");
    delta_sixths += 6 * edge_tokens_from(lu, lv, lambda_);
    if (lv < lu) {
      delta_sixths += vertex_delta(u, +1);
      vert[u].below.insert(v);
    } else {
      vert[u].nbr_at[lv].insert(v);
    }
    if (lu < lv) {
      delta_sixths += vertex_delta(v, +1);
      vert[v].below.insert(u);
    } else {
      vert[v].nbr_at[lu].insert(u);
    }
    ++vert[u].degree;
    ++vert[v].degree;
    ++edge_count_;
  } else {
    DYNCOL_CHECK(has_edge(u, v), "delete of absent edge");
    delta_sixths -= 6 * edge_tokens_from(lu, lv, lambda_);
    if (lv < lu) {
      delta_sixths += vertex_delta(u, -1);
      vert[u].below.erase(v);
    } else {
      vert[u].nbr_at[lv].erase(v);
    }
    if (lu < lv) {
      delta_sixths += vertex_delta(v, -1);
      vert[v].below.erase(u);
    } else {
      vert[v].nbr_at[lu].erase(u);
    }
    --vert[u].degree;
    --vert[v].degree;
    --edge_count_;
  }
  ledger.bump(delta_sixths);
  return delta_sixths;
}

SortedSet& GraphState::mark_set(int kind, Level i) {
  DYNCOL_CHECK(i >= kBottomLevel && i <= lambda_, "mark level out of range");
  switch (kind) {
    case 0: return mrkd_u[i];
    case 1: return mrkd_l[i];
    case 2: return unmrkd[i];
    default: fail("bad mark set kind");
  }
}

void GraphState::recolor_isolated(VertexId u, ColorId c, std::optional<Timestamp> ts) {
  DYNCOL_CHECK(u < n(), "bad vertex");
  DYNCOL_CHECK(vert[u].degree == 0, "recolor_isolated requires an isolated vertex");
  DYNCOL_CHECK(c >= 0 && c <= delta_, "color out of range");
  set_color(u, c);
  if (ts) vert[u].ts = *ts;
}

int32_t GraphState::brute_mu(VertexId u, ColorId c) const {
  int32_t cnt = 0;
  const VertexState& s = vert[u];
  for (Level l = s.level; l <= lambda_; ++l)
    for (VertexId v : s.nbr_at[l])
      if (vert[v].color == c) ++cnt;
  return cnt;
}

void GraphState::check_invariants(bool between_batches) const {
  int64_t edges_seen = 0;
  for (VertexId u = 0; u < n(); ++u) {
    const VertexState& s = vert[u];
    DYNCOL_CHECK(s.level >= kBottomLevel && s.level <= lambda_, "level out of range");
    DYNCOL_CHECK(chi[u] == s.color, "chi mirror out of sync");
    DYNCOL_CHECK(s.color == kBlank || (s.color >= 0 && s.color <= delta_), "color out of range");
    DYNCOL_CHECK(s.degree <= delta_, "degree above delta");

    size_t total = s.below.size();
    for (VertexId v : s.below) {
      DYNCOL_CHECK(vert[v].level < s.level, "below entry not below");
      DYNCOL_CHECK(vert[v].level >= s.level || vert[v].nbr_at[s.level].contains(u),
                   "asymmetric adjacency");
    }
    for (Level l = 0; l <= lambda_; ++l) {
      for (VertexId v : s.nbr_at[l]) {
        DYNCOL_CHECK(l >= s.level, "nbr_at slot below own level");
        DYNCOL_CHECK(vert[v].level == l, "nbr_at entry at wrong level");
        bool back = s.level < l ? vert[v].below.contains(u) : vert[v].nbr_at[s.level].contains(u);
        DYNCOL_CHECK(back, "asymmetric adjacency");
      }
      total += s.nbr_at[l].size();
    }
    DYNCOL_CHECK(static_cast<int32_t>(total) == s.degree, "degree cache out of sync");
    edges_seen += static_cast<int64_t>(total);

    // Counter and palette coherence.
    std::vector<ColorId> upper_used;
    for (Level l = s.level; l <= lambda_; ++l)
      for (VertexId v : s.nbr_at[l])
        if (vert[v].color != kBlank) upper_used.push_back(vert[v].color);
    std::sort(upper_used.begin(), upper_used.end());
    upper_used.erase(std::unique(upper_used.begin(), upper_used.end()), upper_used.end());
    for (ColorId c : upper_used)
      DYNCOL_CHECK(s.mu.get(c) == brute_mu(u, c), "counter out of sync");
    auto upper_pal = s.palette.upper_colors();
    DYNCOL_CHECK(upper_pal == upper_used, "palette partition out of sync with counters");
    s.palette.check_invariants();
  }
  DYNCOL_CHECK(edges_seen == 2 * edge_count_, "edge count out of sync");

  if (between_batches) {
    for (VertexId u = 0; u < n(); ++u)
      DYNCOL_CHECK(vert[u].color != kBlank, "blank vertex between batches");
    for_each_edge([&](VertexId u, VertexId v) {
      DYNCOL_CHECK(vert[u].color != vert[v].color, "monochromatic edge between batches");
    });
    for (Level i = kBottomLevel; i <= lambda_; ++i) {
      DYNCOL_CHECK(mrkd_u[i].empty() && mrkd_l[i].empty() && unmrkd[i].empty(),
                   "mark sets not empty between batches");
    }
  }
}

}  // namespace dyncol

#include "dyncol/batch_updater.hpp"

#include <map>
#include <stdexcept>

#include "dyncol/palette.hpp"
#include "dyncol/partial_coloring.hpp"
#include "dyncol/rng.hpp"
#include "dyncol/update_framework.hpp"

namespace dyncol {

namespace {

uint8_t origin_of(const BatchMetrics& m, VertexId u) {
  auto it = m.blank_origin.find(u);
  return it == m.blank_origin.end() ? uint8_t{0} : it->second;
}

}  // namespace

NormalizeResult normalize(const GraphState& g, const Batch& raw) {
  NormalizeResult r;
  std::map<std::pair<VertexId, VertexId>, std::pair<int64_t, int64_t>> agg;  // (ins, del)
  for (const BatchOp& op : raw.ops) {
    DYNCOL_CHECK(op.u < g.n() && op.v < g.n(), "vertex out of range in batch");
    if (op.u == op.v) {
      ++r.self_loops;
      continue;
    }
    auto key = std::minmax(op.u, op.v);
    auto& slot = agg[{key.first, key.second}];
    ++(op.insert ? slot.first : slot.second);
  }

  std::vector<BatchOp> dels, inss;
  for (const auto& [edge, counts] : agg) {
    auto [ni, nd] = counts;
    if (ni > 0 && nd > 0) {
      r.cancelled += ni + nd;
      continue;
    }
    if (ni > 0) {
      r.duplicates += ni - 1;
      if (g.has_edge(edge.first, edge.second))
        ++r.noops;
      else
        inss.push_back(BatchOp{true, edge.first, edge.second});
    } else {
      r.duplicates += nd - 1;
      if (!g.has_edge(edge.first, edge.second))
        ++r.noops;
      else
        dels.push_back(BatchOp{false, edge.first, edge.second});
    }
  }

  std::map<VertexId, int32_t> net;
  for (const auto& op : dels) {
    --net[op.u];
    --net[op.v];
  }
  for (const auto& op : inss) {
    ++net[op.u];
    ++net[op.v];
  }
  for (const auto& [x, d] : net) {
    if (g.degree(x) + d > g.delta()) {
      r.rejected = true;
      r.overflow_vertex = x;
      r.error = "batch rejected: degree of vertex " + std::to_string(x) +
                " would exceed delta = " + std::to_string(g.delta());
      return r;
    }
  }

  // Deletes apply before inserts, so degrees never overshoot transiently.
  r.batch.ops = std::move(dels);
  r.batch.ops.insert(r.batch.ops.end(), inss.begin(), inss.end());
  return r;
}

void reconcile_palettes(GraphState& g, std::vector<std::pair<VertexId, ColorId>> touched) {
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  size_t i = 0;
  std::vector<ColorId> ups, downs;
  while (i < touched.size()) {
    const VertexId v = touched[i].first;
    ups.clear();
    downs.clear();
    for (; i < touched.size() && touched[i].first == v; ++i) {
      const ColorId c = touched[i].second;
      const bool upper = g.vert[v].palette.is_upper(c);
      const int32_t mu = g.mu_plus(v, c);
      if (mu > 0 && !upper)
        ups.push_back(c);
      else if (mu == 0 && upper)
        downs.push_back(c);
    }
    g.vert[v].palette.move_down(downs);
    g.vert[v].palette.move_up(ups);
  }
}

std::vector<std::pair<VertexId, ColorId>> uncolor_and_classify(GraphState& g,
                                                               const std::vector<VertexId>& xs,
                                                               uint8_t origin, BatchMetrics* m,
                                                               const ExecPolicy& pol) {
  if (xs.empty()) return {};
  std::vector<RequestBuffer> bufs(xs.size());
  parallel_for(pol, xs.size(), [&](size_t idx) {
    const VertexId x = xs[idx];
    const ColorId c = g.color(x);
    DYNCOL_CHECK(c != kBlank, "uncoloring a blank vertex");
    RequestBuffer& buf = bufs[idx];
    auto dec = [&](VertexId w) {
      buf.record(UpdateRequest{w, false, ReqTag::Counter, ReqOp::CounterDec, c, 0, 0});
    };
    for (VertexId w : g.vert[x].below) dec(w);
    for (VertexId w : g.vert[x].nbr_at[g.level(x)]) dec(w);
  });
  auto touched = apply_all(g, bufs).counters_touched;

  for (VertexId x : xs) {
    g.set_color(x, kBlank);
    const Classification cls = classify(g, x);
    const int kind = cls == Classification::UpperMarked ? 0
                     : cls == Classification::LowerMarked ? 1
                                                          : 2;
    g.mark_set(kind, g.level(x)).insert(x);
    if (m) m->blank_origin[x] = origin;
  }
  return touched;
}

void init_phase(GraphState& g, const Batch& batch, BatchMetrics& m, const ExecPolicy& pol) {
  const auto& ops = batch.ops;
  std::vector<std::pair<VertexId, ColorId>> touched;

  if (!ops.empty()) {
    // Per-op ledger attribution: sizes are simulated in op order so the
    // max(0, .) clamp in the vertex potential is split exactly per update.
    std::map<VertexId, int64_t> pending_below;
    int64_t phase_delta = 0;
    auto vertex_delta = [&](VertexId x, int64_t change) {
      const VertexState& s = g.vert[x];
      int64_t b = static_cast<int64_t>(s.below.size()) + pending_below[x];
      pending_below[x] += change;
      return vertex_tokens_sixths_from(s.level, b + change) -
             vertex_tokens_sixths_from(s.level, b);
    };
    for (const BatchOp& op : ops) {
      const Level lu = g.level(op.u), lv = g.level(op.v);
      int64_t d = 0;
      const int64_t sign = op.insert ? 1 : -1;
      d += sign * 6 * edge_tokens_from(lu, lv, g.lambda());
      if (lv < lu) d += vertex_delta(op.u, sign);
      if (lu < lv) d += vertex_delta(op.v, sign);
      g.ledger.bump(d);
      phase_delta += d;
      m.injected_sixths += std::max<int64_t>(0, d);
      m.max_op_injection_sixths = std::max(m.max_op_injection_sixths, d);
      ++m.structural_ops;
      g.count_structural(op.u, op.v, op.insert);
    }
    g.ledger.note("init-structural", phase_delta);

    // Structural set updates plus counter/palette effects of surviving
    // colors, grouped per target. Colors are read before anything is blanked,
    // so an endpoint blanked later first counts in, then the uncoloring
    // decrement takes it back out.
    std::vector<RequestBuffer> bufs(ops.size());
    parallel_for(pol, ops.size(), [&](size_t idx) {
      const BatchOp& op = ops[idx];
      RequestBuffer& buf = bufs[idx];
      const Level lu = g.level(op.u), lv = g.level(op.v);
      const ReqOp set_op = op.insert ? ReqOp::SetInsert : ReqOp::SetDelete;
      const ReqOp cnt_op = op.insert ? ReqOp::CounterInc : ReqOp::CounterDec;
      auto side = [&](VertexId src, VertexId dst, Level ls, Level ld) {
        if (ls >= ld) {
          buf.record(UpdateRequest{dst, false, ReqTag::NbrAt, set_op, ls, 0,
                                   static_cast<int64_t>(src)});
          buf.record(UpdateRequest{dst, false, ReqTag::Counter, cnt_op, g.color(src), 0, 0});
        } else {
          buf.record(UpdateRequest{dst, false, ReqTag::Below, set_op, 0, 0,
                                   static_cast<int64_t>(src)});
        }
      };
      side(op.u, op.v, lu, lv);
      side(op.v, op.u, lv, lu);
    });
    m.count(WorkPhase::Init, static_cast<int64_t>(ops.size()) * 4);
    touched = apply_all(g, bufs).counters_touched;
  }

  // Monochromatic inserted edges blank their later-recolored endpoint.
  std::vector<VertexId> blank;
  for (const BatchOp& op : ops) {
    if (!op.insert) continue;
    if (g.color(op.u) != g.color(op.v)) continue;
    blank.push_back(later_endpoint(op.u, g.timestamp(op.u), op.v, g.timestamp(op.v)));
  }
  std::sort(blank.begin(), blank.end());
  blank.erase(std::unique(blank.begin(), blank.end()), blank.end());
  m.blank_from_updates = static_cast<int64_t>(blank.size());
  for (VertexId x : blank) m.count(WorkPhase::Init, g.degree(x));

  auto touched2 = uncolor_and_classify(g, blank, 0, &m, pol);
  touched.insert(touched.end(), touched2.begin(), touched2.end());
  reconcile_palettes(g, std::move(touched));

  m.mrkd_u_sizes.assign(static_cast<size_t>(g.lambda()) + 1, 0);
  m.mrkd_l_sizes.assign(static_cast<size_t>(g.lambda()) + 1, 0);
  m.unmrkd_sizes.assign(static_cast<size_t>(g.lambda()) + 1, 0);
  for (Level i = kBottomLevel; i <= g.lambda(); ++i) {
    m.mrkd_u_sizes[i] = static_cast<int64_t>(g.mrkd_u[i].size());
    m.mrkd_l_sizes[i] = static_cast<int64_t>(g.mrkd_l[i].size());
    m.unmrkd_sizes[i] = static_cast<int64_t>(g.unmrkd[i].size());
  }
}

namespace {

ColoringInstance build_instance(const GraphState& g, const std::vector<VertexId>& xs, Level i,
                                const ExecPolicy& pol) {
  ColoringInstance inst;
  inst.verts = xs;
  inst.adj.resize(xs.size());
  inst.palette.resize(xs.size());
  parallel_for(pol, xs.size(), [&](size_t p) {
    // Same-level members only, so instance edges all live in nbr_at[i].
    for (VertexId v : g.vert[xs[p]].nbr_at[i].intersect(xs)) {
      auto it = std::lower_bound(xs.begin(), xs.end(), v);
      inst.adj[p].push_back(static_cast<uint32_t>(it - xs.begin()));
    }
  });
  return inst;
}

// Counter increments at all same-or-lower-level neighbors of freshly colored
// vertices.
std::vector<std::pair<VertexId, ColorId>> apply_color_increments(
    GraphState& g, const std::vector<std::pair<VertexId, ColorId>>& colored, Level i,
    const ExecPolicy& pol, int64_t* work) {
  std::vector<RequestBuffer> bufs(colored.size());
  parallel_for(pol, colored.size(), [&](size_t k) {
    const auto [u, c] = colored[k];
    RequestBuffer& buf = bufs[k];
    auto inc = [&](VertexId w) {
      buf.record(UpdateRequest{w, false, ReqTag::Counter, ReqOp::CounterInc, c, 0, 0});
    };
    for (VertexId w : g.vert[u].below) inc(w);
    for (VertexId w : g.vert[u].nbr_at[i]) inc(w);
  });
  if (work)
    for (const auto& [u, c] : colored) *work += g.degree(u);
  return apply_all(g, bufs).counters_touched;
}

}  // namespace

void color_marked(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol) {
  std::vector<VertexId> xs;
  std::set_union(g.mrkd_u[i].begin(), g.mrkd_u[i].end(), g.mrkd_l[i].begin(), g.mrkd_l[i].end(),
                 std::back_inserter(xs));
  if (xs.empty()) return;

  ColoringInstance inst = build_instance(g, xs, i, pol);
  // Blank prefixes are built once; afterwards the instance palettes shrink by
  // the colors the instance itself consumes.
  parallel_for(pol, xs.size(), [&](size_t p) {
    const VertexId u = xs[p];
    const int32_t count = build_blank_prefix(g, u);
    const int32_t need = static_cast<int32_t>(inst.adj[p].size()) + 1;
    DYNCOL_CHECK(count >= need, "fewer blank colors than marked instance degree + 1");
    g.vert[u].palette.copy_prefix(need, inst.palette[p]);
  });
  for (VertexId u : xs) m.count(WorkPhase::ColorMarked, g.vert[u].below.size() + 1);

  const int64_t cap = coloring_round_cap(xs.size());
  int32_t round = 0;
  while (inst.size() > 0) {
    if (round >= cap) throw std::runtime_error("marked coloring exceeded its round cap");
    RngCtx ctx{g.seed(), static_cast<uint64_t>(g.batches), rng::Phase::ColorMarked,
               static_cast<uint64_t>(i), static_cast<uint64_t>(round)};
    PartialResult res =
        partial_color(inst, ctx, pol, &m.work[static_cast<size_t>(WorkPhase::ColorMarked)]);
    auto touched = apply_color_increments(g, res.colored, i, pol,
                                          &m.work[static_cast<size_t>(WorkPhase::ColorMarked)]);
    for (const auto& [u, c] : res.colored) {
      g.set_color(u, c);
      g.set_timestamp(u, Timestamp::deterministic());
      m.records.push_back(
          RecolorRecord{u, g.batches, i, true, base_level(g, u), origin_of(m, u)});
    }
    reconcile_palettes(g, std::move(touched));
    for (size_t p = 0; p < res.residual.size(); ++p) {
      auto& pal = res.residual.palette[p];
      for (ColorId c : res.taken[p]) std::erase(pal, c);
    }
    inst = std::move(res.residual);
    ++round;
  }
  m.color_marked_rounds_max = std::max(m.color_marked_rounds_max, round);
}

void color_unmarked(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol) {
  if (g.unmrkd[i].empty()) return;
  const int64_t cap = coloring_round_cap(g.unmrkd[i].size());
  // C_u gets at least ceil(3^(i-5)/2) + 1 colors where that many blank-or-
  // unique colors exist; clamped otherwise (possible only at levels where the
  // lower condition is not guaranteed, see ledger).
  const int64_t floor_size = (pow3(i - 5) + 1) / 2 + 1;
  int32_t round = 0;

  while (!g.unmrkd[i].empty()) {
    if (round >= cap) throw std::runtime_error("unmarked coloring exceeded its round cap");
    const std::vector<VertexId> xs = g.unmrkd[i].items();
    ColoringInstance inst = build_instance(g, xs, i, pol);
    // Palettes are rebuilt from scratch every round: a chained uncoloring a
    // round earlier may have changed which colors are unique.
    parallel_for(pol, xs.size(), [&](size_t p) {
      const VertexId u = xs[p];
      const int64_t count = build_blank_unique_prefix(g, u);
      const int64_t need = static_cast<int64_t>(inst.adj[p].size()) + 1;
      DYNCOL_CHECK(count >= need, "fewer blank+unique colors than instance degree + 1");
      const int64_t size = std::min<int64_t>(count, std::max<int64_t>(need, floor_size));
      g.vert[u].palette.copy_prefix(static_cast<int32_t>(size), inst.palette[p]);
    });
    for (VertexId u : xs) m.count(WorkPhase::ColorUnmarked, g.vert[u].below.size() + 1);

    RngCtx ctx{g.seed(), static_cast<uint64_t>(g.batches), rng::Phase::ColorUnmarked,
               static_cast<uint64_t>(i), static_cast<uint64_t>(round)};
    PartialResult res =
        partial_color(inst, ctx, pol, &m.work[static_cast<size_t>(WorkPhase::ColorUnmarked)]);
    auto touched = apply_color_increments(g, res.colored, i, pol,
                                          &m.work[static_cast<size_t>(WorkPhase::ColorUnmarked)]);
    std::vector<VertexId> colored_ids;
    colored_ids.reserve(res.colored.size());
    for (const auto& [u, c] : res.colored) {
      g.set_color(u, c);
      g.set_timestamp(u, Timestamp::numbered(g.batches, i));
      m.records.push_back(
          RecolorRecord{u, g.batches, i, false, base_level(g, u), origin_of(m, u)});
      colored_ids.push_back(u);
    }

    // A kept unique color has exactly one colored lower holder, which now
    // goes blank; duplicates collapse through the sorted set.
    std::vector<VertexId> chain;
    for (const auto& [u, c] : res.colored) {
      VertexId holder = 0;
      int found = 0;
      for (VertexId w : g.vert[u].below) {
        if (g.color(w) == c) {
          holder = w;
          ++found;
        }
      }
      m.count(WorkPhase::ColorUnmarked, g.vert[u].below.size());
      DYNCOL_CHECK(found <= 1, "sampled color was neither blank nor unique");
      if (found == 1) chain.push_back(holder);
    }
    std::sort(chain.begin(), chain.end());
    chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
    for (VertexId v : chain) DYNCOL_CHECK(g.level(v) < i, "chain target not strictly below");
    m.blank_from_chains += static_cast<int64_t>(chain.size());

    auto touched2 = uncolor_and_classify(g, chain, 1, &m, pol);
    touched.insert(touched.end(), touched2.begin(), touched2.end());
    reconcile_palettes(g, std::move(touched));

    g.unmrkd[i].erase_batch(std::move(colored_ids));
    ++round;
  }
  m.color_unmarked_rounds_max = std::max(m.color_unmarked_rounds_max, round);
}

namespace {

// Exact ledger delta for a group move: token sums over the affected edges and
// vertices before and after. `movers` sorted, all at `from`.
struct MoveScope {
  std::vector<VertexId> vertex_affected;  // movers plus boundary-crossing neighbors
};

bool is_in(const std::vector<VertexId>& sorted, VertexId x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

template <class F>
void for_each_neighbor(const GraphState& g, VertexId u, F&& f) {
  for (VertexId v : g.vert[u].below) f(v);
  for (Level l = kBottomLevel; l <= g.lambda(); ++l)
    for (VertexId v : g.vert[u].nbr_at[l]) f(v);
}

MoveScope move_scope(const GraphState& g, const std::vector<VertexId>& movers, Level from,
                     Level to) {
  const Level lo = std::min(from, to), hi = std::max(from, to);
  MoveScope s;
  s.vertex_affected = movers;
  for (VertexId u : movers) {
    for_each_neighbor(g, u, [&](VertexId v) {
      const Level lv = g.level(v);
      if (lv > lo && lv <= hi && !is_in(movers, v)) s.vertex_affected.push_back(v);
    });
  }
  std::sort(s.vertex_affected.begin(), s.vertex_affected.end());
  s.vertex_affected.erase(std::unique(s.vertex_affected.begin(), s.vertex_affected.end()),
                          s.vertex_affected.end());
  return s;
}

int64_t scope_tokens(const GraphState& g, const std::vector<VertexId>& movers,
                     const MoveScope& scope) {
  int64_t total = 0;
  for (VertexId u : movers) {
    for_each_neighbor(g, u, [&](VertexId v) {
      if (is_in(movers, v) && v < u) return;  // count internal edges once
      total += 6 * edge_tokens_from(g.level(u), g.level(v), g.lambda());
    });
  }
  for (VertexId x : scope.vertex_affected)
    total += vertex_tokens_sixths_from(g.level(x), static_cast<int64_t>(g.vert[x].below.size()));
  return total;
}

}  // namespace

int64_t raise_group(GraphState& g, const std::vector<VertexId>& movers, Level from, Level to) {
  DYNCOL_CHECK(!movers.empty(), "empty move group");
  DYNCOL_CHECK(to > from && to <= g.lambda(), "raise levels out of order");
  DYNCOL_CHECK(std::is_sorted(movers.begin(), movers.end()), "movers must be sorted");
  for (VertexId u : movers) DYNCOL_CHECK(g.level(u) == from, "mover not at source level");

  const MoveScope scope = move_scope(g, movers, from, to);
  const int64_t before = scope_tokens(g, movers, scope);

  ExecPolicy serial{};  // group sizes are modest; requests stay deterministic either way
  std::vector<RequestBuffer> bufs(movers.size());
  parallel_for(serial, movers.size(), [&](size_t idx) {
    const VertexId u = movers[idx];
    const ColorId c = g.color(u);
    RequestBuffer& buf = bufs[idx];
    auto rehome = [&](VertexId v) {
      buf.record(UpdateRequest{v, false, ReqTag::NbrAt, ReqOp::SetDelete, from, 0,
                               static_cast<int64_t>(u)});
      buf.record(UpdateRequest{v, false, ReqTag::NbrAt, ReqOp::SetInsert, to, 0,
                               static_cast<int64_t>(u)});
    };
    // Neighbors that keep u at-or-above them: table moves only.
    for (VertexId v : g.vert[u].below) rehome(v);
    for (VertexId v : g.vert[u].nbr_at[from]) rehome(v);
    // Neighbors u climbs past: u leaves their below set and starts counting.
    for (Level j = from + 1; j <= to; ++j) {
      for (VertexId v : g.vert[u].nbr_at[j]) {
        buf.record(UpdateRequest{v, false, ReqTag::Below, ReqOp::SetDelete, 0, 0,
                                 static_cast<int64_t>(u)});
        buf.record(UpdateRequest{v, false, ReqTag::NbrAt, ReqOp::SetInsert, to, 0,
                                 static_cast<int64_t>(u)});
        if (c != kBlank)
          buf.record(UpdateRequest{v, false, ReqTag::Counter, ReqOp::CounterInc, c, 0, 0});
      }
    }
  });
  auto touched = apply_all(g, bufs).counters_touched;

  // Local step: adopt the new level, absorb old slots [from, to-1] into the
  // below set, and drop counters for neighbors that fell out of view.
  for (VertexId u : movers) {
    g.set_level(u, to);
    std::vector<uint32_t> sink;
    for (Level j = from; j < to; ++j) {
      for (VertexId v : g.vert[u].nbr_at[j]) {
        sink.push_back(v);
        const ColorId cv = g.color(v);
        if (cv != kBlank) {
          g.counter_add(u, cv, -1);
          touched.emplace_back(u, cv);
        }
      }
      g.vert[u].nbr_at[j].clear();
    }
    g.vert[u].below.insert_batch(std::move(sink));
  }
  reconcile_palettes(g, std::move(touched));

  const int64_t after = scope_tokens(g, movers, scope);
  const int64_t delta = after - before;
  g.ledger.bump(delta);
  g.ledger.note("raise", delta);
  return -delta;
}

int64_t lower_group(GraphState& g, const std::vector<VertexId>& movers, Level from, Level to) {
  DYNCOL_CHECK(!movers.empty(), "empty move group");
  DYNCOL_CHECK(to < from && to >= kBottomLevel, "lower levels out of order");
  DYNCOL_CHECK(std::is_sorted(movers.begin(), movers.end()), "movers must be sorted");
  for (VertexId u : movers) DYNCOL_CHECK(g.level(u) == from, "mover not at source level");

  const MoveScope scope = move_scope(g, movers, from, to);
  const int64_t before = scope_tokens(g, movers, scope);

  ExecPolicy serial{};
  std::vector<RequestBuffer> bufs(movers.size());
  parallel_for(serial, movers.size(), [&](size_t idx) {
    const VertexId u = movers[idx];
    const ColorId c = g.color(u);
    RequestBuffer& buf = bufs[idx];
    auto rehome = [&](VertexId v) {
      buf.record(UpdateRequest{v, false, ReqTag::NbrAt, ReqOp::SetDelete, from, 0,
                               static_cast<int64_t>(u)});
      buf.record(UpdateRequest{v, false, ReqTag::NbrAt, ReqOp::SetInsert, to, 0,
                               static_cast<int64_t>(u)});
    };
    auto sink_below = [&](VertexId v) {
      buf.record(UpdateRequest{v, false, ReqTag::NbrAt, ReqOp::SetDelete, from, 0,
                               static_cast<int64_t>(u)});
      buf.record(
          UpdateRequest{v, false, ReqTag::Below, ReqOp::SetInsert, 0, 0, static_cast<int64_t>(u)});
      if (c != kBlank)
        buf.record(UpdateRequest{v, false, ReqTag::Counter, ReqOp::CounterDec, c, 0, 0});
    };
    for (VertexId v : g.vert[u].below) {
      if (g.level(v) <= to)
        rehome(v);  // u stays at-or-above v
      else
        sink_below(v);  // u drops strictly below v
    }
    for (VertexId v : g.vert[u].nbr_at[from]) {
      if (is_in(movers, v))
        rehome(v);  // moves along with u
      else
        sink_below(v);
    }
  });
  auto touched = apply_all(g, bufs).counters_touched;

  // Local step: below entries now at-or-above `to` climb into level slots and
  // start counting.
  for (VertexId u : movers) {
    g.set_level(u, to);
    std::vector<uint32_t> climbed;
    for (VertexId v : g.vert[u].below) {
      const Level lv = g.level(v);
      if (lv < to) continue;
      climbed.push_back(v);
      const ColorId cv = g.color(v);
      if (cv != kBlank) {
        g.counter_add(u, cv, +1);
        touched.emplace_back(u, cv);
      }
    }
    for (VertexId v : climbed) g.vert[u].nbr_at[g.level(v)].insert(v);
    g.vert[u].below.erase_batch(std::move(climbed));
  }
  reconcile_palettes(g, std::move(touched));

  const int64_t after = scope_tokens(g, movers, scope);
  const int64_t delta = after - before;
  g.ledger.bump(delta);
  g.ledger.note("lower", delta);
  return -delta;
}

void raise_level(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol) {
  SortedSet& marked = g.mrkd_u[i];
  if (marked.empty()) return;
  const std::vector<VertexId> orig = marked.items();
  const Level lambda = g.lambda();

  // Snapshot prefix sums: su[p][k - i] = |N_u(5, k-1)| at pass start, for
  // k in [i, lambda+1]. Only level-i neighbors move during this pass, so the
  // live value is su[k] - (initial |N_u(i)| - current |N_u(i)|).
  std::vector<std::vector<int64_t>> su(orig.size());
  std::vector<int64_t> n_init(orig.size());
  for (size_t p = 0; p < orig.size(); ++p) {
    const VertexState& s = g.vert[orig[p]];
    su[p].resize(static_cast<size_t>(lambda - i) + 2);
    su[p][0] = static_cast<int64_t>(s.below.size());
    for (Level k = i + 1; k <= lambda + 1; ++k)
      su[p][k - i] = su[p][k - i - 1] + static_cast<int64_t>(s.nbr_at[k - 1].size());
    n_init[p] = static_cast<int64_t>(s.nbr_at[i].size());
  }
  auto pos_of = [&](VertexId u) {
    return static_cast<size_t>(std::lower_bound(orig.begin(), orig.end(), u) - orig.begin());
  };
  auto pred = [&](VertexId u, Level k) {
    const size_t p = pos_of(u);
    const int64_t below_k = su[p][k - i] - (n_init[p] - static_cast<int64_t>(g.vert[u].nbr_at[i].size()));
    const int64_t upto_k = below_k + static_cast<int64_t>(g.vert[u].nbr_at[k].size());
    return below_k >= pow3(k - 1) && upto_k <= pow3(k);
  };

  std::vector<VertexId> cur = orig, carry;
  const int64_t cap = 24 * coloring_round_cap(orig.size());
  for (Level k = lambda; k >= i + 1; --k) {
    int64_t round = 0;
    while (true) {
      std::vector<VertexId> ptrue;
      ptrue.reserve(cur.size());
      for (VertexId u : cur) (pred(u, k) ? ptrue : carry).push_back(u);
      cur = std::move(ptrue);
      m.count(WorkPhase::Raise, static_cast<int64_t>(cur.size()) + 1);
      if (cur.empty()) break;
      if (round >= cap) throw std::runtime_error("raise exceeded its round cap");

      std::vector<uint8_t> sel(cur.size());
      parallel_for(pol, cur.size(), [&](size_t p) {
        const uint64_t key =
            rng::draw(g.seed(), static_cast<uint64_t>(g.batches), rng::Phase::RaiseSelect,
                      (static_cast<uint64_t>(i) << 16) | static_cast<uint64_t>(k),
                      static_cast<uint64_t>(round), cur[p]);
        sel[p] = rng::one_in(key, 24) ? 1 : 0;
      });
      std::vector<VertexId> sampled;
      for (size_t p = 0; p < cur.size(); ++p)
        if (sel[p]) sampled.push_back(cur[p]);

      std::vector<VertexId> moved;
      for (VertexId u : sampled) {
        const int64_t internal = static_cast<int64_t>(g.vert[u].nbr_at[i].intersect_count(sampled));
        m.count(WorkPhase::Raise, static_cast<int64_t>(g.vert[u].nbr_at[i].size()));
        if (4 * internal <= pow3(k - 1)) moved.push_back(u);  // alpha = 3^(k-1)/4
      }

      RoundStat st;
      st.level_from = i;
      st.level_to = k;
      st.eligible = static_cast<int64_t>(cur.size());
      st.sampled = static_cast<int64_t>(sampled.size());
      st.moved = static_cast<int64_t>(moved.size());
      if (!moved.empty()) {
        for (VertexId u : moved) m.count(WorkPhase::Raise, g.degree(u));
        const int64_t drop = raise_group(g, moved, i, k);
        st.drop_sixths = drop;
        st.required_sixths = 6 * pow3(k - 2) * static_cast<int64_t>(moved.size());
        if (drop < st.required_sixths) ++m.release_violations;
        m.released_sixths += drop;
        std::vector<VertexId> rest;
        std::set_difference(cur.begin(), cur.end(), moved.begin(), moved.end(),
                            std::back_inserter(rest));
        cur = std::move(rest);
        marked.erase_batch(moved);
      }
      m.raise_rounds.push_back(st);
      ++round;
    }
    cur = std::move(carry);
    carry.clear();
  }

  // Unmoved vertices must have fallen under 3^i same-or-lower neighbors.
  for (VertexId u : cur) {
    if (g.level(u) == i && g.upto_level_count(u) > pow3(i)) ++m.raise_unmoved_violations;
  }
  marked.clear();
}

void lower_level(GraphState& g, Level i, BatchMetrics& m, const ExecPolicy& pol) {
  SortedSet& marked = g.mrkd_l[i];
  if (i < kMinLowerLevel) {
    DYNCOL_CHECK(marked.empty(), "lower-marked vertex below the lowering range");
    return;
  }
  if (marked.empty()) return;
  const Level to = i - kLowerStep;
  const int64_t cap = 2 * pow3(6) * coloring_round_cap(marked.size());
  int64_t round = 0;

  while (!marked.empty()) {
    if (round >= cap) throw std::runtime_error("lower exceeded its round cap");
    // Earlier rounds may have refilled a member's below-neighborhood; such
    // vertices no longer violate the lower condition and need no move.
    std::vector<VertexId> still, requalified;
    for (VertexId u : marked.items()) (violates_lower(g, u) ? still : requalified).push_back(u);
    if (!requalified.empty()) {
      m.lower_requalified += static_cast<int64_t>(requalified.size());
      marked.erase_batch(std::move(requalified));
    }
    if (still.empty()) break;
    m.count(WorkPhase::Lower, static_cast<int64_t>(still.size()));

    std::vector<uint8_t> sel(still.size());
    parallel_for(pol, still.size(), [&](size_t p) {
      const uint64_t key =
          rng::draw(g.seed(), static_cast<uint64_t>(g.batches), rng::Phase::LowerSelect,
                    static_cast<uint64_t>(i), static_cast<uint64_t>(round), still[p]);
      sel[p] = rng::one_in(key, 2 * 729) ? 1 : 0;
    });
    std::vector<VertexId> sampled;
    for (size_t p = 0; p < still.size(); ++p)
      if (sel[p]) sampled.push_back(still[p]);

    std::vector<VertexId> moved;
    for (VertexId u : sampled) {
      const int64_t internal = static_cast<int64_t>(g.vert[u].nbr_at[i].intersect_count(sampled));
      m.count(WorkPhase::Lower, static_cast<int64_t>(g.vert[u].nbr_at[i].size()));
      if (internal <= pow3(i - 5)) moved.push_back(u);
    }

    RoundStat st;
    st.level_from = i;
    st.level_to = to;
    st.eligible = static_cast<int64_t>(still.size());
    st.sampled = static_cast<int64_t>(sampled.size());
    st.moved = static_cast<int64_t>(moved.size());
    if (!moved.empty()) {
      for (VertexId u : moved) m.count(WorkPhase::Lower, g.degree(u));
      const int64_t drop = lower_group(g, moved, i, to);
      st.drop_sixths = drop;
      st.required_sixths = 7 * pow3(i - 4) * static_cast<int64_t>(moved.size());
      if (drop < st.required_sixths) ++m.release_violations;
      m.released_sixths += drop;
      marked.erase_batch(moved);
    }
    m.lower_rounds.push_back(st);
    ++round;
  }
  marked.clear();
}

BatchMetrics apply_batch(GraphState& g, const Batch& raw, const ApplyOptions& opt) {
  NormalizeResult norm = normalize(g, raw);
  if (norm.rejected) throw std::invalid_argument(norm.error);

  BatchMetrics m;
  m.normalize_dropped = norm.dropped();
  g.ledger.batch_deltas.clear();
  g.batches += 1;

  init_phase(g, norm.batch, m, opt.pol);
  if (opt.paranoid)
    DYNCOL_CHECK(g.ledger.gamma_sixths == total_tokens_sixths(g), "ledger drift after init");

  const Level lambda = g.lambda();
  for (Level i = lambda; i >= kBottomLevel; --i) {
    color_marked(g, i, m, opt.pol);
    color_unmarked(g, i, m, opt.pol);
  }

  std::vector<std::vector<uint32_t>> snap_u, snap_l;
  if (opt.paranoid) {
    for (Level i = 0; i <= lambda; ++i) snap_u.push_back(g.mrkd_u[i].items());
  }
  for (Level i = lambda; i >= kBottomLevel; --i) {
    if (opt.paranoid)
      DYNCOL_CHECK(g.mrkd_u[i].items() == snap_u[i], "upper mark set changed before processing");
    raise_level(g, i, m, opt.pol);
  }
  if (opt.paranoid) {
    for (Level i = 0; i <= lambda; ++i) snap_l.push_back(g.mrkd_l[i].items());
  }
  for (Level i = kBottomLevel; i <= lambda; ++i) {
    if (opt.paranoid)
      DYNCOL_CHECK(g.mrkd_l[i].items() == snap_l[i], "lower mark set changed before processing");
    lower_level(g, i, m, opt.pol);
  }

  for (Level i = kBottomLevel; i <= lambda; ++i) {
    DYNCOL_CHECK(g.mrkd_u[i].empty() && g.mrkd_l[i].empty() && g.unmrkd[i].empty(),
                 "mark sets survived the batch");
  }
  if (opt.paranoid) {
    DYNCOL_CHECK(g.ledger.gamma_sixths == total_tokens_sixths(g), "ledger drift after batch");
    g.check_invariants(true);
  }
  m.ledger_deltas = g.ledger.batch_deltas;
  return m;
}

}  // namespace dyncol

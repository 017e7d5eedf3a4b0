#include "dyncol/partial_coloring.hpp"

#include <stdexcept>

namespace dyncol {

void ColoringInstance::validate() const {
  if (adj.size() != verts.size() || palette.size() != verts.size())
    throw std::invalid_argument("coloring instance arrays disagree in length");
  for (size_t p = 0; p < verts.size(); ++p) {
    if (palette[p].size() < adj[p].size() + 1)
      throw std::invalid_argument("palette smaller than instance degree + 1");
  }
}

PartialResult partial_color(const ColoringInstance& inst, const RngCtx& ctx,
                            const ExecPolicy& pol, int64_t* work) {
  inst.validate();
  const size_t m = inst.size();
  PartialResult res;
  if (m == 0) return res;

  std::vector<ColorId> sample(m);
  parallel_for(pol, m, [&](size_t p) {
    const auto& pal = inst.palette[p];
    uint64_t key = rng::draw(ctx.seed, ctx.batch, ctx.phase, ctx.a, ctx.round, inst.verts[p]);
    sample[p] = pal[rng::uniform_below(key, static_cast<uint32_t>(pal.size()))];
  });

  std::vector<uint8_t> kept(m, 1);
  int64_t scanned = 0;
  parallel_for(pol, m, [&](size_t p) {
    for (uint32_t q : inst.adj[p]) {
      if (sample[q] == sample[p]) {
        kept[p] = 0;
        break;
      }
    }
  });
  for (size_t p = 0; p < m; ++p) scanned += static_cast<int64_t>(inst.adj[p].size());
  if (work) *work += static_cast<int64_t>(m) + scanned;

  // Compact the rejected vertices into the residual, remapping positions.
  std::vector<uint32_t> new_pos(m, UINT32_MAX);
  for (size_t p = 0; p < m; ++p) {
    if (kept[p]) {
      res.colored.emplace_back(inst.verts[p], sample[p]);
    } else {
      new_pos[p] = static_cast<uint32_t>(res.residual.verts.size());
      res.residual.verts.push_back(inst.verts[p]);
    }
  }
  res.residual.adj.resize(res.residual.verts.size());
  res.residual.palette.resize(res.residual.verts.size());
  res.taken.resize(res.residual.verts.size());
  for (size_t p = 0; p < m; ++p) {
    if (kept[p]) continue;
    uint32_t np = new_pos[p];
    for (uint32_t q : inst.adj[p]) {
      if (kept[q])
        res.taken[np].push_back(sample[q]);
      else
        res.residual.adj[np].push_back(new_pos[q]);
    }
    res.residual.palette[np] = inst.palette[p];
  }
  return res;
}

StaticColoringResult static_list_color(ColoringInstance inst, RngCtx ctx, const ExecPolicy& pol,
                                       int64_t* work) {
  StaticColoringResult out;
  const int64_t cap = coloring_round_cap(inst.size());
  while (inst.size() > 0) {
    if (out.rounds >= cap)
      throw std::runtime_error("static list coloring exceeded its round cap");
    ctx.round = static_cast<uint64_t>(out.rounds);
    PartialResult res = partial_color(inst, ctx, pol, work);
    out.assignment.insert(out.assignment.end(), res.colored.begin(), res.colored.end());
    // Shrink palettes by the colors claimed next door; the deg+1 slack
    // survives because each removed color comes with a removed neighbor.
    for (size_t p = 0; p < res.residual.size(); ++p) {
      auto& pal = res.residual.palette[p];
      for (ColorId c : res.taken[p]) std::erase(pal, c);
    }
    inst = std::move(res.residual);
    ++out.rounds;
  }
  return out;
}

}  // namespace dyncol

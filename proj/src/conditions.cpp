#include "dyncol/conditions.hpp"

namespace dyncol {

bool violates_upper(const GraphState& g, VertexId u) {
  return g.upto_level_count(u) > pow3(g.level(u) + 2);
}

bool violates_lower(const GraphState& g, VertexId u) {
  const Level l = g.level(u);
  if (l <= kBottomLevel) return false;
  return static_cast<int64_t>(g.vert[u].below.size()) < pow3(l - 5);
}

Classification classify(const GraphState& g, VertexId u) {
  if (violates_upper(g, u)) return Classification::UpperMarked;
  if (g.level(u) >= kMinLowerLevel && violates_lower(g, u)) return Classification::LowerMarked;
  return Classification::Clean;
}

int64_t edge_tokens(const GraphState& g, VertexId u, VertexId v) {
  DYNCOL_CHECK(g.has_edge(u, v), "edge_tokens on absent edge");
  return edge_tokens_from(g.level(u), g.level(v), g.lambda());
}

int64_t vertex_tokens_sixths(const GraphState& g, VertexId v) {
  return vertex_tokens_sixths_from(g.level(v), static_cast<int64_t>(g.vert[v].below.size()));
}

int64_t total_tokens_sixths(const GraphState& g) {
  int64_t total = 0;
  g.for_each_edge([&](VertexId u, VertexId v) {
    total += 6 * edge_tokens_from(g.level(u), g.level(v), g.lambda());
  });
  for (VertexId v = 0; v < g.n(); ++v) total += vertex_tokens_sixths(g, v);
  return total;
}

Level base_level(const GraphState& g, VertexId u) {
  const int64_t cnt = g.upto_level_count(u);
  const Level l = g.level(u);
  if (cnt == 0) return l;
  return std::max<Level>(l, floor_log3(cnt));
}

}  // namespace dyncol

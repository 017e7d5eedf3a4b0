#pragma once

#include "dyncol/graph_state.hpp"

namespace dyncol {

enum class Classification { UpperMarked, LowerMarked, Clean };

// Upper condition violated: |N_u(5, l(u))| > 3^(l(u)+2).
bool violates_upper(const GraphState& g, VertexId u);

// Lower condition violated: l(u) > 5 and |N_u(5, l(u)-1)| < 3^(l(u)-5).
// Bottom-level vertices are exempt.
bool violates_lower(const GraphState& g, VertexId u);

// Upper violation wins; lower violations mark only at levels >= 9 so that the
// four-level drop stays inside [5, lambda] (lower-violating vertices at
// levels 6..8 classify as Clean).
Classification classify(const GraphState& g, VertexId u);

// theta(u,v) in whole tokens; edge must be present.
int64_t edge_tokens(const GraphState& g, VertexId u, VertexId v);

// 6*theta(v) as an exact integer.
int64_t vertex_tokens_sixths(const GraphState& g, VertexId v);

// Brute-force Gamma in sixths; ledger verification oracle.
int64_t total_tokens_sixths(const GraphState& g);

// b(u) = max(floor(log3 |N_u(5, l(u))|), l(u)), with the empty neighborhood
// degenerating to l(u).
Level base_level(const GraphState& g, VertexId u);

}  // namespace dyncol

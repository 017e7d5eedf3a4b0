#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dyncol/common.hpp"

namespace dyncol {

class GraphState;

// Within a group for one (target, tag) instance, operations apply in this
// fixed order: deletions, insertions, counter decrements, counter increments,
// palette moves down, palette moves up, scalar sets. This makes the
// decrement-then-test-zero idiom well defined.
enum class ReqOp : uint8_t {
  SetDelete = 0,
  SetInsert = 1,
  CounterDec = 2,
  CounterInc = 3,
  PaletteMoveDown = 4,
  PaletteMoveUp = 5,
  ScalarSet = 6,
};

enum class ReqTag : uint8_t {
  NbrAt = 0,     // p0 = level, arg = vertex
  Below = 1,     // arg = vertex
  Counter = 2,   // p0 = color
  Palette = 3,   // arg = color
  MarkSet = 4,   // global; p0 = level, p1 = kind (0 Mrkd_U, 1 Mrkd_L, 2 Unmrkd), arg = vertex
  Chi = 5,       // arg = color
  LevelTag = 6,  // arg = level
  TsTag = 7,     // arg = encoded timestamp
};

struct UpdateRequest {
  VertexId target = 0;
  bool global = false;
  ReqTag tag = ReqTag::NbrAt;
  ReqOp op = ReqOp::SetInsert;
  int32_t p0 = 0;
  int32_t p1 = 0;
  int64_t arg = 0;

  bool operator==(const UpdateRequest&) const = default;
};

// Per-task append-only request log; tasks never share a buffer.
struct RequestBuffer {
  std::vector<UpdateRequest> reqs;
  void record(const UpdateRequest& r) { reqs.push_back(r); }
};

struct ApplyResult {
  size_t applied = 0;
  // Distinct (vertex, color) counter pairs touched, ascending. Callers scan
  // these for the zero test and emit the follow-up palette moves.
  std::vector<std::pair<VertexId, ColorId>> counters_touched;
};

// Groups requests by (target, tag) instance and applies each group as batch
// calls in canonical op order. The post state is identical for any
// permutation of the buffers. Buffers are consumed.
ApplyResult apply_all(GraphState& g, std::span<RequestBuffer> buffers);

int64_t encode_timestamp(const struct Timestamp& t);
struct Timestamp decode_timestamp(int64_t v);

}  // namespace dyncol

#include "dyncol/update_framework.hpp"

#include <algorithm>
#include <tuple>

#include "dyncol/graph_state.hpp"

namespace dyncol {

int64_t encode_timestamp(const Timestamp& t) {
  if (t.det) return int64_t{1} << 62;
  return (static_cast<int64_t>(t.batch) << 16) | static_cast<int64_t>(t.level & 0xffff);
}

Timestamp decode_timestamp(int64_t v) {
  if (v == (int64_t{1} << 62)) return Timestamp::deterministic();
  return Timestamp::numbered(static_cast<int32_t>(v >> 16), static_cast<Level>(v & 0xffff));
}

namespace {

// Full canonical key: grouping by (global, target, tag, p0, p1) and a stable
// op/arg order inside each group, so the result cannot depend on buffer
// order.
auto req_key(const UpdateRequest& r) {
  return std::tuple(r.global, r.target, r.tag, r.p0, r.p1, r.op, r.arg);
}

}  // namespace

ApplyResult apply_all(GraphState& g, std::span<RequestBuffer> buffers) {
  ApplyResult result;
  std::vector<UpdateRequest> reqs;
  size_t total = 0;
  for (const auto& b : buffers) total += b.reqs.size();
  reqs.reserve(total);
  for (auto& b : buffers) {
    reqs.insert(reqs.end(), b.reqs.begin(), b.reqs.end());
    b.reqs.clear();
  }
  std::sort(reqs.begin(), reqs.end(),
            [](const UpdateRequest& a, const UpdateRequest& b) { return req_key(a) < req_key(b); });
  result.applied = reqs.size();

  size_t i = 0;
  while (i < reqs.size()) {
    size_t j = i;
    const UpdateRequest& head = reqs[i];
    auto same_group = [&](const UpdateRequest& r) {
      return r.global == head.global && r.target == head.target && r.tag == head.tag &&
             r.p0 == head.p0 && r.p1 == head.p1;
    };
    while (j < reqs.size() && same_group(reqs[j])) ++j;
    DYNCOL_CHECK(head.global || head.target < g.n(), "request for nonexistent target");

    switch (head.tag) {
      case ReqTag::NbrAt:
      case ReqTag::Below: {
        std::vector<uint32_t> dels, inss;
        for (size_t k = i; k < j; ++k) {
          auto& r = reqs[k];
          (r.op == ReqOp::SetDelete ? dels : inss).push_back(static_cast<uint32_t>(r.arg));
          DYNCOL_CHECK(r.op == ReqOp::SetDelete || r.op == ReqOp::SetInsert, "bad set op");
        }
        SortedSet& s = head.tag == ReqTag::Below ? g.vert[head.target].below
                                                 : g.vert[head.target].nbr_at[head.p0];
        s.erase_batch(std::move(dels));
        s.insert_batch(std::move(inss));
        break;
      }
      case ReqTag::Counter: {
        int32_t net = 0;
        for (size_t k = i; k < j; ++k) {
          DYNCOL_CHECK(reqs[k].op == ReqOp::CounterDec || reqs[k].op == ReqOp::CounterInc,
                       "bad counter op");
          net += reqs[k].op == ReqOp::CounterInc ? 1 : -1;
        }
        g.counter_add(head.target, head.p0, net);
        result.counters_touched.emplace_back(head.target, head.p0);
        break;
      }
      case ReqTag::Palette: {
        std::vector<ColorId> downs, ups;
        for (size_t k = i; k < j; ++k) {
          auto& r = reqs[k];
          DYNCOL_CHECK(r.op == ReqOp::PaletteMoveDown || r.op == ReqOp::PaletteMoveUp,
                       "bad palette op");
          (r.op == ReqOp::PaletteMoveDown ? downs : ups).push_back(static_cast<ColorId>(r.arg));
        }
        g.vert[head.target].palette.move_down(downs);
        g.vert[head.target].palette.move_up(ups);
        break;
      }
      case ReqTag::MarkSet: {
        std::vector<uint32_t> dels, inss;
        for (size_t k = i; k < j; ++k)
          (reqs[k].op == ReqOp::SetDelete ? dels : inss).push_back(
              static_cast<uint32_t>(reqs[k].arg));
        SortedSet& s = g.mark_set(head.p1, head.p0);
        s.erase_batch(std::move(dels));
        s.insert_batch(std::move(inss));
        break;
      }
      case ReqTag::Chi:
      case ReqTag::LevelTag:
      case ReqTag::TsTag: {
        for (size_t k = i; k < j; ++k) {
          DYNCOL_CHECK(reqs[k].op == ReqOp::ScalarSet, "bad scalar op");
          DYNCOL_CHECK(reqs[k].arg == head.arg, "conflicting scalar sets in one group");
        }
        if (head.tag == ReqTag::Chi)
          g.set_color(head.target, static_cast<ColorId>(head.arg));
        else if (head.tag == ReqTag::LevelTag)
          g.set_level(head.target, static_cast<Level>(head.arg));
        else
          g.set_timestamp(head.target, decode_timestamp(head.arg));
        break;
      }
    }
    i = j;
  }

  // counters_touched is already grouped-unique and ascending by construction.
  return result;
}

}  // namespace dyncol

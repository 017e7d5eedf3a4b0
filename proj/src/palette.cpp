#include "dyncol/palette.hpp"

#include <numeric>

#include "dyncol/graph_state.hpp"

namespace dyncol {

PartitionedPalette::PartitionedPalette(int32_t delta, Rep rep) : delta_(delta) {
  DYNCOL_CHECK(delta >= 1, "palette needs delta >= 1");
  dense_ = rep == Rep::Auto ? delta <= kDenseMax : rep == Rep::Dense;
  if (dense_) {
    arr_.resize(static_cast<size_t>(delta) + 1);
    std::iota(arr_.begin(), arr_.end(), 0);
    pos_ = arr_;
    split_ = delta + 1;  // everything starts lower
  }
}

int32_t PartitionedPalette::lower_size() const {
  if (dense_) return split_;
  return delta_ + 1 - static_cast<int32_t>(upper_.size());
}

bool PartitionedPalette::is_upper(ColorId c) const {
  DYNCOL_CHECK(c >= 0 && c <= delta_, "color out of palette range");
  if (dense_) return pos_[static_cast<size_t>(c)] >= split_;
  return upper_.contains(static_cast<uint32_t>(c));
}

std::vector<ColorId> PartitionedPalette::filter_lower(const std::vector<ColorId>& b) const {
  std::vector<ColorId> out;
  out.reserve(b.size());
  for (ColorId c : b) {
    DYNCOL_CHECK(c >= 0 && c <= delta_, "color out of palette range");
    if (!is_upper(c)) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ColorId> PartitionedPalette::filter_upper(const std::vector<ColorId>& b) const {
  std::vector<ColorId> out;
  out.reserve(b.size());
  for (ColorId c : b) {
    DYNCOL_CHECK(c >= 0 && c <= delta_, "color out of palette range");
    if (is_upper(c)) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void PartitionedPalette::swap_entries(int32_t p, int32_t q) {
  std::swap(arr_[p], arr_[q]);
  pos_[arr_[p]] = p;
  pos_[arr_[q]] = q;
}

void PartitionedPalette::pack_lower_suffix(const std::vector<ColorId>& b) {
  const int32_t t = static_cast<int32_t>(b.size());
  const int32_t region = split_ - t;
  auto in_b = [&](ColorId c) { return std::binary_search(b.begin(), b.end(), c); };
  // b-colors still outside the region, slots inside holding strangers.
  std::vector<ColorId> outside;
  std::vector<int32_t> slots;
  for (ColorId c : b)
    if (pos_[c] < region) outside.push_back(c);
  for (int32_t p = region; p < split_; ++p)
    if (!in_b(arr_[p])) slots.push_back(p);
  DYNCOL_CHECK(outside.size() == slots.size(), "palette rearrange bookkeeping");
  for (size_t k = 0; k < outside.size(); ++k) swap_entries(pos_[outside[k]], slots[k]);
}

void PartitionedPalette::pack_upper_prefix(const std::vector<ColorId>& b) {
  const int32_t t = static_cast<int32_t>(b.size());
  auto in_b = [&](ColorId c) { return std::binary_search(b.begin(), b.end(), c); };
  std::vector<ColorId> outside;
  std::vector<int32_t> slots;
  for (ColorId c : b)
    if (pos_[c] >= split_ + t) outside.push_back(c);
  for (int32_t p = split_; p < split_ + t; ++p)
    if (!in_b(arr_[p])) slots.push_back(p);
  DYNCOL_CHECK(outside.size() == slots.size(), "palette rearrange bookkeeping");
  for (size_t k = 0; k < outside.size(); ++k) swap_entries(pos_[outside[k]], slots[k]);
}

void PartitionedPalette::move_up(const std::vector<ColorId>& b) {
  auto keep = filter_lower(b);
  if (keep.empty()) return;
  if (dense_) {
    pack_lower_suffix(keep);
    split_ -= static_cast<int32_t>(keep.size());
  } else {
    upper_.insert_batch(std::vector<uint32_t>(keep.begin(), keep.end()));
  }
}

void PartitionedPalette::move_down(const std::vector<ColorId>& b) {
  auto keep = filter_upper(b);
  if (keep.empty()) return;
  if (dense_) {
    pack_upper_prefix(keep);
    split_ += static_cast<int32_t>(keep.size());
  } else {
    upper_.erase_batch(std::vector<uint32_t>(keep.begin(), keep.end()));
  }
}

void PartitionedPalette::rearrange_lower(const std::vector<ColorId>& b) {
  auto keep = filter_lower(b);
  if (keep.empty()) return;
  if (dense_) pack_lower_suffix(keep);
  // The sparse lower palette carries no order; prefixes are derived in
  // build_prefix instead.
}

int32_t PartitionedPalette::build_prefix(const std::vector<ColorId>& exclude) {
  auto keep = filter_lower(exclude);
  if (dense_) {
    pack_lower_suffix(keep);
    return split_ - static_cast<int32_t>(keep.size());
  }
  prefix_exclude_ = std::move(keep);
  return lower_size() - static_cast<int32_t>(prefix_exclude_.size());
}

void PartitionedPalette::copy_prefix(int32_t k, std::vector<ColorId>& out) const {
  out.clear();
  if (k <= 0) return;
  if (dense_) {
    DYNCOL_CHECK(k <= split_, "prefix longer than lower palette");
    out.assign(arr_.begin(), arr_.begin() + k);
    return;
  }
  // Ascending colors minus upper_ minus prefix_exclude_.
  out.reserve(static_cast<size_t>(k));
  auto up = upper_.items().begin();
  auto ex = prefix_exclude_.begin();
  for (ColorId c = 0; c <= delta_ && static_cast<int32_t>(out.size()) < k; ++c) {
    while (up != upper_.items().end() && static_cast<ColorId>(*up) < c) ++up;
    if (up != upper_.items().end() && static_cast<ColorId>(*up) == c) continue;
    while (ex != prefix_exclude_.end() && *ex < c) ++ex;
    if (ex != prefix_exclude_.end() && *ex == c) continue;
    out.push_back(c);
  }
  DYNCOL_CHECK(static_cast<int32_t>(out.size()) == k, "prefix longer than available colors");
}

std::vector<ColorId> PartitionedPalette::upper_colors() const {
  if (!dense_) return std::vector<ColorId>(upper_.items().begin(), upper_.items().end());
  std::vector<ColorId> out(arr_.begin() + split_, arr_.end());
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<ColorId>& PartitionedPalette::array() const {
  DYNCOL_CHECK(dense_, "array view exists only for the dense representation");
  return arr_;
}

const std::vector<int32_t>& PartitionedPalette::positions() const {
  DYNCOL_CHECK(dense_, "position view exists only for the dense representation");
  return pos_;
}

void PartitionedPalette::check_invariants() const {
  if (dense_) {
    DYNCOL_CHECK(split_ >= 0 && split_ <= delta_ + 1, "split out of range");
    DYNCOL_CHECK(arr_.size() == static_cast<size_t>(delta_) + 1, "array size");
    for (int32_t p = 0; p <= delta_; ++p) {
      ColorId c = arr_[p];
      DYNCOL_CHECK(c >= 0 && c <= delta_, "array entry out of range");
      DYNCOL_CHECK(pos_[c] == p, "inverse map mismatch");
    }
  } else {
    for (uint32_t c : upper_.items())
      DYNCOL_CHECK(static_cast<ColorId>(c) <= delta_, "upper color out of range");
  }
}

namespace {

// Distinct colors of colored strictly-below neighbors of u, ascending; when
// unique_cut is set, only colors held by at least two such neighbors.
std::vector<ColorId> below_color_multiset(const GraphState& g, VertexId u, bool only_multi) {
  std::vector<ColorId> cols;
  const VertexState& s = g.vert[u];
  cols.reserve(s.below.size());
  for (VertexId v : s.below) {
    ColorId c = g.color(v);
    if (c != kBlank) cols.push_back(c);
  }
  std::sort(cols.begin(), cols.end());
  std::vector<ColorId> out;
  for (size_t a = 0; a < cols.size();) {
    size_t b = a;
    while (b < cols.size() && cols[b] == cols[a]) ++b;
    if (!only_multi || b - a >= 2) out.push_back(cols[a]);
    a = b;
  }
  return out;
}

}  // namespace

int32_t build_blank_prefix(GraphState& g, VertexId u) {
  DYNCOL_CHECK(g.color(u) == kBlank, "blank prefix requires a blank vertex");
  return g.vert[u].palette.build_prefix(below_color_multiset(g, u, /*only_multi=*/false));
}

int32_t build_blank_unique_prefix(GraphState& g, VertexId u) {
  DYNCOL_CHECK(g.color(u) == kBlank, "blank+unique prefix requires a blank vertex");
  return g.vert[u].palette.build_prefix(below_color_multiset(g, u, /*only_multi=*/true));
}

}  // namespace dyncol

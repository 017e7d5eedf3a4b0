#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace dyncol {

// Flat sorted-unique vector used for adjacency slots, mark sets and color
// sets. Listing is always in ascending order, which keeps every consumer of
// set contents schedule-independent. Batch insert/erase play the role of the
// batch-parallel hash table operations.
class SortedSet {
 public:
  bool contains(uint32_t x) const {
    auto it = std::lower_bound(v_.begin(), v_.end(), x);
    return it != v_.end() && *it == x;
  }

  bool insert(uint32_t x) {
    auto it = std::lower_bound(v_.begin(), v_.end(), x);
    if (it != v_.end() && *it == x) return false;
    v_.insert(it, x);
    return true;
  }

  bool erase(uint32_t x) {
    auto it = std::lower_bound(v_.begin(), v_.end(), x);
    if (it == v_.end() || *it != x) return false;
    v_.erase(it);
    return true;
  }

  // xs need not be sorted or unique.
  void insert_batch(std::vector<uint32_t> xs) {
    if (xs.empty()) return;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<uint32_t> merged;
    merged.reserve(v_.size() + xs.size());
    std::set_union(v_.begin(), v_.end(), xs.begin(), xs.end(), std::back_inserter(merged));
    v_ = std::move(merged);
  }

  void erase_batch(std::vector<uint32_t> xs) {
    if (xs.empty()) return;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<uint32_t> rest;
    rest.reserve(v_.size());
    std::set_difference(v_.begin(), v_.end(), xs.begin(), xs.end(), std::back_inserter(rest));
    v_ = std::move(rest);
  }

  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  void clear() { v_.clear(); }
  const std::vector<uint32_t>& items() const { return v_; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  // |this ∩ xs| for sorted-unique xs.
  size_t intersect_count(const std::vector<uint32_t>& xs) const {
    size_t cnt = 0;
    auto a = v_.begin();
    auto b = xs.begin();
    while (a != v_.end() && b != xs.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++cnt;
        ++a;
        ++b;
      }
    }
    return cnt;
  }

  std::vector<uint32_t> intersect(const std::vector<uint32_t>& xs) const {
    std::vector<uint32_t> out;
    std::set_intersection(v_.begin(), v_.end(), xs.begin(), xs.end(), std::back_inserter(out));
    return out;
  }

  bool operator==(const SortedSet&) const = default;

 private:
  std::vector<uint32_t> v_;
};

}  // namespace dyncol

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyncol/batch_updater.hpp"

namespace dyncol {

// Text format: first line "n delta"; then per batch lines "+ u v" / "- u v",
// batches closed by a line "---"; '#' starts a comment.
struct Workload {
  uint32_t n = 0;
  int32_t delta = 0;
  std::vector<Batch> batches;

  int64_t total_ops() const {
    int64_t s = 0;
    for (const auto& b : batches) s += static_cast<int64_t>(b.ops.size());
    return s;
  }
  bool operator==(const Workload&) const = default;
};

struct WorkloadError : std::runtime_error {
  int line;
  WorkloadError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

Workload parse_workload(const std::string& text);
std::string emit_workload(const Workload& w);

struct GenConfig {
  uint32_t n = 0;
  int32_t delta = 0;
  int32_t batches = 0;
  int32_t batch_size = 0;
  double mix = 1.0;  // insert fraction
  uint64_t seed = 1;
};

// Random delta-respecting workload, deterministic in the seed. Inserts sample
// uniformly among absent eligible pairs, deletes among present edges; every
// generated batch passes normalize with zero drops.
Workload generate_workload(const GenConfig& cfg);

}  // namespace dyncol

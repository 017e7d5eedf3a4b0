#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyncol/baselines.hpp"
#include "dyncol/batch_updater.hpp"
#include "dyncol/workload.hpp"

namespace dyncol {

enum class Algorithm { Parallel, RelaxedSeq, Folklore2Delta };
enum class VerifyMode { End, EveryBatch };

const char* algorithm_name(Algorithm a);
bool parse_algorithm(const std::string& s, Algorithm& out);

struct Violation {
  VertexId u = 0, v = 0;
  ColorId cu = 0, cv = 0;
  std::string kind;  // "monochromatic", "blank", "out-of-range"
};

std::vector<Violation> verify_proper(const GraphState& g);
std::vector<Violation> verify_proper(const FolkloreState& st);

struct RunConfig {
  Algorithm algorithm = Algorithm::Parallel;
  uint64_t seed = 1;
  VerifyMode verify = VerifyMode::End;
  int32_t ledger_check_every = 0;  // 0: end of run only
  bool per_batch = false;
  int threads = 1;
};

struct RunReport {
  std::string algorithm;
  uint32_t n = 0;
  int32_t delta = 0;
  Level lambda = 0;
  uint64_t seed = 0;
  int64_t batches = 0;
  int64_t updates = 0;

  int64_t violations = 0;
  int64_t verify_scans = 0;

  std::array<int64_t, kWorkPhases> work{};
  int64_t work_total = 0;
  double work_per_update = 0.0;
  double work_per_update_per_log3delta = 0.0;

  int64_t injected_sixths = 0;
  int64_t released_sixths = 0;
  int64_t max_op_injection_sixths = 0;
  int64_t injection_bound_sixths = 0;
  bool injection_bound_ok = true;

  int64_t ledger_checks = 0;
  int64_t ledger_mismatches = 0;
  int64_t final_gamma_sixths = 0;

  int64_t blank_from_updates = 0;
  int64_t blank_from_chains = 0;
  int32_t color_marked_rounds_max = 0;
  int32_t color_unmarked_rounds_max = 0;

  int64_t raise_rounds = 0, raise_moved = 0;
  double raise_fraction_sum = 0.0;  // sum over rounds of moved/eligible
  int64_t lower_rounds = 0, lower_moved = 0;
  double lower_fraction_sum = 0.0;
  int64_t release_violations = 0;
  int64_t raise_unmoved_violations = 0;

  int64_t records_total = 0, records_clean = 0, records_dirty = 0;
  int64_t records_clean_spawning = 0;  // clean records blanked by an update conflict

  int64_t normalize_dropped = 0;

  // Baseline-specific
  int64_t seq_chain_depth_max = 0;
  int64_t seq_moves = 0;
  int64_t folklore_palette_claim_violations = 0;
  int64_t folklore_recolored = 0;

  nlohmann::json to_json() const;
};

// Replays the workload under the chosen algorithm. Per-batch JSON lines go to
// *per_batch_out when non-null and cfg.per_batch is set. The report carries
// ledger mismatches and propriety violations instead of throwing; input-level
// problems (rejected batches) throw std::invalid_argument.
RunReport run(const Workload& w, const RunConfig& cfg, std::ostream* per_batch_out = nullptr);

struct BenchConfig {
  std::vector<int32_t> deltas;
  uint32_t n = 10000;
  int64_t updates = 100000;
  uint64_t seed = 1;
  int threads = 1;
};

// Single-insert amortized-cost sweep. Inserts until `updates` ops or edge
// saturation (whichever first) and reports work/(T*log3(delta)) per delta.
nlohmann::json bench(const BenchConfig& cfg);

}  // namespace dyncol

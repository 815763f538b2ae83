#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccs/amp.hpp"
#include "ccs/fwht.hpp"
#include "ccs/outer_code.hpp"
#include "ccs/params.hpp"

namespace ccs {

struct Trial {
  std::vector<Payload> payloads;  // K distinct messages
  std::vector<double> y;          // received vector, length n
  uint64_t seed = 0;
};

struct ErrorReport {
  double pupe = 0.0;
  int missed = 0;
  int false_alarms = 0;
  int decoded_count = 0;
};

// Entry k counts how many payloads map to support index k (collisions keep
// their multiplicity).
std::vector<double> aggregate_counts(const std::vector<Payload>& payloads,
                                     const OuterGraph& graph);

// K distinct uniform payloads (resampled on duplicates), aggregate signal
// x = D * counts, y = A x + z with unit-variance Gaussian z. Fully
// determined by (params, operator, seed).
Trial gen_trial(const SystemParams& params, const PowerProfile& profile, const OuterGraph& graph,
                const SensingOperator& op, uint64_t seed, bool noiseless = false);

// missed = |tx \ rx| as sets, pupe = missed/K, false alarms = |rx \ tx|.
ErrorReport pupe(const std::vector<Payload>& tx, const std::vector<Payload>& rx);

struct PointResult {
  double mean_pupe = 0.0;
  double stderr_pupe = 0.0;          // binomial-style; 0 sentinel for one trial
  double mean_decode_seconds = 0.0;  // AMP + stitch only
};

// Independent trials with seeds base_seed + i; the operator is built once
// from base_seed. Timing covers the decode path only.
PointResult run_point(int case_id, double ebn0_db, int trials, uint64_t base_seed,
                      const SystemParams& params, ThreadPool* pool = nullptr,
                      bool noiseless = false);

}  // namespace ccs

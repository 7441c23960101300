#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cpdetect/costs.hpp"

namespace cpd {

struct PruningStats {
  std::int64_t max_candidates = 0;
  double mean_candidates = 0.0;
  // Live candidate count at each dynamic-programming step; filled on request.
  std::vector<std::int64_t> per_step;
};

struct DPResult {
  Segmentation segmentation;
  // best_cost[s] is the optimal penalized cost of observations 1..s;
  // best_cost[0] = -beta, and +inf marks lengths below the minimum segment.
  std::vector<double> best_cost;
  std::vector<std::int64_t> prev;
  PruningStats pruning;
};

// Exact penalized optimum by dynamic programming over the last changepoint,
// evaluating every admissible candidate (quadratic time).
DPResult optimal_partitioning(const CostModel& model, double beta);

// Same recursion with candidate pruning: a candidate whose cost plus the
// model's pruning constant exceeds the current optimum can never win again
// and is dropped (once the dominating split is itself old enough to be an
// admissible last changepoint). Exact whenever the pruning inequality holds.
DPResult pelt(const CostModel& model, double beta, bool trace_candidates = false);

// Greedy top-down splitting. Splits are applied best-improvement-first and
// accepted while the improvement strictly exceeds beta. When
// max_changepoints is given the acceptance test is skipped and exactly that
// many splits are forced (fewer if no admissible split remains).
Segmentation binary_segmentation(const CostModel& model, double beta,
                                 std::optional<std::int64_t> max_changepoints = std::nullopt);

struct SNEntry {
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();  // unpenalized
  std::vector<std::int64_t> changepoints;
};

// Exact minimum segment cost for every changepoint count 0..max_changepoints
// (quadratic per count). Counts that do not fit the minimum segment length
// are marked infeasible.
std::vector<SNEntry> segment_neighbourhood(const CostModel& model,
                                           std::int64_t max_changepoints);

// Exhaustive search over all changepoint subsets under a general penalty
// scheme. Refuses series longer than 20 observations.
Segmentation brute_force_oracle(const CostModel& model, const PenaltyScheme& penalty);

// Samples admissible (t, s, u) split triples and counts how often
// cost(t,s) + cost(s,u) + K exceeds cost(t,u) + tol. A nonzero return means
// pruning is not safe for this model.
std::int64_t check_pruning_inequality(const CostModel& model, std::uint64_t seed,
                                      std::int64_t trials, double tol = 1e-9);

}  // namespace cpd

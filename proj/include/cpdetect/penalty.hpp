#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpdetect/search.hpp"

namespace cpd {

enum class ConstantPenaltyKind { manual, aic, sic };

// aic: beta = 2p. sic: beta = p log n (n >= 2). manual: beta = value >= 0.
// p is the number of parameters a changepoint adds.
PenaltyScheme make_constant_penalty(ConstantPenaltyKind kind, int params_per_changepoint,
                                    std::int64_t n, std::optional<double> manual_value = {});

PenaltyScheme make_concave_sqrt(double scale);       // f(m) = sqrt(m)
PenaltyScheme make_concave_log(double scale);        // f(m) = log(1 + m)
PenaltyScheme make_mdl_penalty(std::int64_t n);      // f(m) = log(m) + m log(n), scale 1

// Penalty registry: "sic" | "aic" | "manual:<float>" | "concave:sqrt" |
// "concave:log" | "mdl". Concave specs default their scale to the model's
// SIC constant p log n.
PenaltyScheme parse_penalty_spec(std::string_view spec, const CostModel& model);

enum class ConcaveStatus { converged, cycled, iteration_limit };

const char* concave_status_name(ConcaveStatus status) noexcept;

struct ConcaveIterate {
  double gamma;
  std::int64_t num_changepoints;
  double score;         // penalized objective of this iterate's segmentation
  double best_so_far;
};

struct ConcaveResult {
  Segmentation segmentation;
  double score;
  ConcaveStatus status;
  std::vector<ConcaveIterate> trace;

  std::int64_t iterations() const noexcept { return static_cast<std::int64_t>(trace.size()); }
};

// Minimizes sum of segment costs + beta f(m) for concave increasing f by
// iterating constant-penalty searches: gamma_0 = beta f'(1), then
// gamma_{k+1} = beta f'(m_k) (falling back to f'(1) when m_k = 0). Each
// iterate is the exact optimum at its gamma: the pruned search is used only
// when the model's pruning constant is exactly zero (guaranteed on any
// data), otherwise the unpruned one. Stops when the changepoint count
// repeats consecutively (converged, that segmentation is returned) or
// reappears non-consecutively (cycled) or after max_iters; in the latter two
// cases the best-scoring iterate is returned.
ConcaveResult concave_iteration(const CostModel& model, const PenaltyScheme& scheme,
                                int max_iters = 20, std::optional<double> initial_gamma = {});

struct PenalizedOptimum {
  Segmentation segmentation;
  double score;
  std::int64_t num_changepoints;
};

// Exact minimizer of sum of segment costs + penalty(m) for m up to
// max_changepoints, via segment neighbourhood. Ties prefer fewer
// changepoints.
PenalizedOptimum exact_penalized_optimum(const CostModel& model, const PenaltyScheme& scheme,
                                         std::int64_t max_changepoints);

}  // namespace cpd

#include "cpdetect/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpd {

PenaltyScheme make_constant_penalty(ConstantPenaltyKind kind, int params_per_changepoint,
                                    std::int64_t n, std::optional<double> manual_value) {
  switch (kind) {
    case ConstantPenaltyKind::manual:
      if (!manual_value) throw_invalid("manual penalty requires a value");
      return PenaltyScheme::constant(*manual_value, "manual");
    case ConstantPenaltyKind::aic:
      if (params_per_changepoint < 1) throw_invalid("aic requires at least one parameter");
      return PenaltyScheme::constant(2.0 * params_per_changepoint, "aic");
    case ConstantPenaltyKind::sic:
      if (params_per_changepoint < 1) throw_invalid("sic requires at least one parameter");
      if (n < 2) throw_invalid("sic requires a series of at least 2 observations");
      return PenaltyScheme::constant(
          static_cast<double>(params_per_changepoint) * std::log(static_cast<double>(n)), "sic");
  }
  throw_invalid("unknown constant penalty kind");
}

PenaltyScheme make_concave_sqrt(double scale) {
  return PenaltyScheme::concave(
      "concave:sqrt", scale, [](double m) { return std::sqrt(m); },
      [](double m) { return 0.5 / std::sqrt(m); });
}

PenaltyScheme make_concave_log(double scale) {
  return PenaltyScheme::concave(
      "concave:log", scale, [](double m) { return std::log1p(m); },
      [](double m) { return 1.0 / (1.0 + m); });
}

PenaltyScheme make_mdl_penalty(std::int64_t n) {
  if (n < 2) throw_invalid("mdl requires a series of at least 2 observations");
  const double log_n = std::log(static_cast<double>(n));
  return PenaltyScheme::concave(
      "mdl", 1.0, [log_n](double m) { return std::log(m) + m * log_n; },
      [log_n](double m) { return 1.0 / m + log_n; });
}

PenaltyScheme parse_penalty_spec(std::string_view spec, const CostModel& model) {
  const int p = model.default_penalty_params();
  const std::int64_t n = model.n();
  if (spec == "sic") return make_constant_penalty(ConstantPenaltyKind::sic, p, n);
  if (spec == "aic") return make_constant_penalty(ConstantPenaltyKind::aic, p, n);
  if (spec == "mdl") return make_mdl_penalty(n);
  if (spec.rfind("manual:", 0) == 0) {
    const std::string value(spec.substr(7));
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(value, &used);
    } catch (const std::exception&) {
      throw_invalid("malformed manual penalty value '" + value + "'");
    }
    if (used != value.size()) throw_invalid("malformed manual penalty value '" + value + "'");
    if (!std::isfinite(beta) || beta < 0.0) {
      throw_invalid("manual penalty must be finite and nonnegative");
    }
    return PenaltyScheme::constant(beta, "manual");
  }
  if (spec == "concave:sqrt" || spec == "concave:log") {
    if (n < 2) throw_invalid("concave penalties require a series of at least 2 observations");
    const double scale = static_cast<double>(p) * std::log(static_cast<double>(n));
    return spec == "concave:sqrt" ? make_concave_sqrt(scale) : make_concave_log(scale);
  }
  throw_invalid("unknown penalty spec '" + std::string(spec) +
                "'; expected sic | aic | manual:<value> | concave:sqrt | concave:log | mdl");
}

const char* concave_status_name(ConcaveStatus status) noexcept {
  switch (status) {
    case ConcaveStatus::converged: return "converged";
    case ConcaveStatus::cycled: return "cycled";
    case ConcaveStatus::iteration_limit: return "iteration-limit";
  }
  return "?";
}

ConcaveResult concave_iteration(const CostModel& model, const PenaltyScheme& scheme,
                                int max_iters, std::optional<double> initial_gamma) {
  if (max_iters < 1) throw_invalid("max_iters must be positive");
  if (initial_gamma && (!std::isfinite(*initial_gamma) || *initial_gamma < 0.0)) {
    throw_invalid("initial gamma must be finite and nonnegative");
  }
  const double start_slope = scheme.beta() * scheme.fprime(1);
  // Every iterate must be the exact optimum at its gamma, so pruning is used
  // only where its inequality is guaranteed on any data: a zero constant.
  // Nonzero constants (the autoregressive cost) are heuristic bounds that
  // observably fail, which would poison the iteration's fixed points.
  const bool prune_safely = model.pruning_constant() == 0.0;

  std::vector<ConcaveIterate> trace;
  std::vector<std::int64_t> seen;
  std::optional<Segmentation> best_seg;
  double best_score = std::numeric_limits<double>::infinity();

  double gamma = initial_gamma.value_or(start_slope);
  for (int iter = 0; iter < max_iters; ++iter) {
    DPResult r = prune_safely ? pelt(model, gamma) : optimal_partitioning(model, gamma);
    const std::int64_t m = r.segmentation.num_changepoints();
    const double score = recompute_cost(model, r.segmentation, scheme);
    if (score < best_score) {
      best_score = score;
      best_seg = r.segmentation;
    }
    trace.push_back({gamma, m, score, best_score});

    if (!seen.empty() && seen.back() == m) {
      r.segmentation.set_total_cost(score);
      return {std::move(r.segmentation), score, ConcaveStatus::converged, std::move(trace)};
    }
    const bool recurrence = std::find(seen.begin(), seen.end(), m) != seen.end();
    seen.push_back(m);
    if (recurrence) {
      best_seg->set_total_cost(best_score);
      return {std::move(*best_seg), best_score, ConcaveStatus::cycled, std::move(trace)};
    }
    gamma = m == 0 ? start_slope : scheme.beta() * scheme.fprime(m);
  }
  best_seg->set_total_cost(best_score);
  return {std::move(*best_seg), best_score, ConcaveStatus::iteration_limit, std::move(trace)};
}

PenalizedOptimum exact_penalized_optimum(const CostModel& model, const PenaltyScheme& scheme,
                                         std::int64_t max_changepoints) {
  const auto entries = segment_neighbourhood(model, max_changepoints);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_m = -1;
  for (std::int64_t m = 0; m < static_cast<std::int64_t>(entries.size()); ++m) {
    if (!entries[m].feasible) continue;
    const double score = entries[m].cost + scheme.penalty(m);
    if (score < best) {
      best = score;
      best_m = m;
    }
  }
  if (best_m < 0) throw_infeasible("no feasible changepoint count");
  Segmentation seg(entries[best_m].changepoints, model.n(), 0.0);
  // Rescore through the same summation path the iterative searches use so
  // score comparisons are free of association-order drift.
  const double score = recompute_cost(model, seg, scheme);
  seg.set_total_cost(score);
  return {std::move(seg), score, best_m};
}

}  // namespace cpd

#include "cpdetect/search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "cpdetect/rng.hpp"

namespace cpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_beta(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw_invalid("penalty constant must be finite and nonnegative");
  }
}

void check_runnable(const CostModel& model) {
  if (model.n() < model.min_segment_length()) {
    throw_infeasible("series of length " + std::to_string(model.n()) +
                     " is shorter than one minimum-length segment (" +
                     std::to_string(model.min_segment_length()) + ")");
  }
}

Segmentation backtrack(const std::vector<std::int64_t>& prev, std::int64_t n, double total) {
  std::vector<std::int64_t> cps;
  for (std::int64_t b = prev[n]; b > 0; b = prev[b]) cps.push_back(b);
  std::reverse(cps.begin(), cps.end());
  return Segmentation(std::move(cps), n, total);
}

// Shared engine for optimal partitioning (prune = false) and PELT. Ties in
// the minimization go to the smallest candidate position; candidates are kept
// in ascending order so a strict < scan implements that. A pruned candidate
// is excluded only from steps >= fail_step + min_segment, which keeps the
// exactness argument valid under a minimum segment length: by then the step
// it lost to is itself an admissible last changepoint.
DPResult run_partition_dp(const CostModel& model, double beta, bool prune,
                          bool trace_candidates) {
  check_beta(beta);
  check_runnable(model);
  const std::int64_t n = model.n();
  const std::int64_t ell = model.min_segment_length();
  const double prune_k = prune ? model.pruning_constant() : 0.0;
  constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

  std::vector<double> best(n + 1, kInf);
  std::vector<std::int64_t> prev(n + 1, -1);
  best[0] = -beta;

  struct Candidate {
    std::int64_t pos;
    std::int64_t drop_at;  // first step this candidate is excluded from
  };
  std::vector<Candidate> cands;
  cands.push_back({0, kNever});
  std::vector<double> fits;

  PruningStats stats;
  double live_sum = 0.0;
  std::int64_t steps = 0;

  for (std::int64_t s = ell; s <= n; ++s) {
    if (s - ell >= ell) cands.push_back({s - ell, kNever});
    fits.assign(cands.size(), kInf);

    double best_fit = kInf;
    std::int64_t arg = -1;
    std::int64_t live = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (cands[i].drop_at <= s) continue;
      ++live;
      const double fit = best[cands[i].pos] + model.segment_cost(cands[i].pos, s);
      fits[i] = fit;
      if (fit < best_fit) {
        best_fit = fit;
        arg = cands[i].pos;
      }
    }
    if (arg < 0) throw_internal("candidate set emptied during the dynamic program");
    best[s] = best_fit + beta;
    prev[s] = arg;

    ++steps;
    live_sum += static_cast<double>(live);
    stats.max_candidates = std::max(stats.max_candidates, live);
    if (trace_candidates) stats.per_step.push_back(live);

    if (prune) {
      for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].drop_at != kNever || fits[i] == kInf) continue;
        if (fits[i] + prune_k > best[s]) cands[i].drop_at = s + ell;
      }
      std::erase_if(cands, [s](const Candidate& c) { return c.drop_at <= s + 1; });
    }
  }

  stats.mean_candidates = steps > 0 ? live_sum / static_cast<double>(steps) : 0.0;

  DPResult result{backtrack(prev, n, best[n]), std::move(best), std::move(prev),
                  std::move(stats)};
  return result;
}

}  // namespace

DPResult optimal_partitioning(const CostModel& model, double beta) {
  return run_partition_dp(model, beta, false, false);
}

DPResult pelt(const CostModel& model, double beta, bool trace_candidates) {
  return run_partition_dp(model, beta, true, trace_candidates);
}

namespace {

struct SplitChoice {
  std::int64_t lo, hi;   // interval (lo, hi] under consideration
  std::int64_t split;    // best changepoint inside it
  double gain;           // cost(lo,hi) - cost(lo,split) - cost(split,hi)
};

struct SplitOrder {
  // Max-heap on gain; ties prefer the leftmost interval, then the leftmost
  // split, so results are deterministic.
  bool operator()(const SplitChoice& a, const SplitChoice& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    if (a.lo != b.lo) return a.lo > b.lo;
    return a.split > b.split;
  }
};

std::optional<SplitChoice> best_split(const CostModel& model, std::int64_t lo, std::int64_t hi) {
  const std::int64_t ell = model.min_segment_length();
  if (hi - lo < 2 * ell) return std::nullopt;
  const double whole = model.segment_cost(lo, hi);
  double best_sum = kInf;
  std::int64_t best_tau = -1;
  for (std::int64_t tau = lo + ell; tau <= hi - ell; ++tau) {
    const double sum = model.segment_cost(lo, tau) + model.segment_cost(tau, hi);
    if (sum < best_sum) {
      best_sum = sum;
      best_tau = tau;
    }
  }
  return SplitChoice{lo, hi, best_tau, whole - best_sum};
}

}  // namespace

Segmentation binary_segmentation(const CostModel& model, double beta,
                                 std::optional<std::int64_t> max_changepoints) {
  check_beta(beta);
  check_runnable(model);
  if (max_changepoints && *max_changepoints < 0) {
    throw_invalid("max_changepoints must be nonnegative");
  }
  const std::int64_t n = model.n();

  std::priority_queue<SplitChoice, std::vector<SplitChoice>, SplitOrder> queue;
  if (auto first = best_split(model, 0, n)) queue.push(*first);

  std::vector<std::int64_t> cps;
  while (!queue.empty()) {
    if (max_changepoints && static_cast<std::int64_t>(cps.size()) >= *max_changepoints) break;
    const SplitChoice top = queue.top();
    queue.pop();
    // Strict improvement over the penalty is required; the queue is
    // gain-ordered, so once the best remaining split fails they all do.
    if (!max_changepoints && !(top.gain > beta)) break;
    cps.push_back(top.split);
    if (auto left = best_split(model, top.lo, top.split)) queue.push(*left);
    if (auto right = best_split(model, top.split, top.hi)) queue.push(*right);
  }

  std::sort(cps.begin(), cps.end());
  Segmentation seg(std::move(cps), n, 0.0);
  const auto b = seg.boundaries();
  double total = beta * static_cast<double>(seg.num_changepoints());
  for (std::size_t i = 0; i + 1 < b.size(); ++i) total += model.segment_cost(b[i], b[i + 1]);
  seg.set_total_cost(total);
  return seg;
}

std::vector<SNEntry> segment_neighbourhood(const CostModel& model,
                                           std::int64_t max_changepoints) {
  if (max_changepoints < 0) throw_invalid("max_changepoints must be nonnegative");
  check_runnable(model);
  const std::int64_t n = model.n();
  const std::int64_t ell = model.min_segment_length();
  const std::int64_t q_max = max_changepoints;

  // Pre-tabulating every admissible segment cost pays off only when a single
  // evaluation is expensive; the table calls the model's own evaluator so all
  // searches share identical arithmetic.
  const bool cache = !model.constant_time_eval() && n <= 2500;
  std::vector<double> table;
  if (cache) {
    table.assign(static_cast<std::size_t>(n + 1) * (n + 1), kInf);
    for (std::int64_t t = 0; t + ell <= n; ++t) {
      for (std::int64_t s = t + ell; s <= n; ++s) {
        table[static_cast<std::size_t>(t) * (n + 1) + s] = model.segment_cost(t, s);
      }
    }
  }
  auto seg_cost = [&](std::int64_t t, std::int64_t s) {
    return cache ? table[static_cast<std::size_t>(t) * (n + 1) + s] : model.segment_cost(t, s);
  };

  std::vector<std::vector<double>> acc(q_max + 1, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::int32_t>> back(q_max + 1,
                                              std::vector<std::int32_t>(n + 1, -1));
  for (std::int64_t s = ell; s <= n; ++s) acc[0][s] = seg_cost(0, s);
  for (std::int64_t q = 1; q <= q_max; ++q) {
    for (std::int64_t s = (q + 1) * ell; s <= n; ++s) {
      double best = kInf;
      std::int64_t arg = -1;
      for (std::int64_t t = q * ell; t + ell <= s; ++t) {
        if (acc[q - 1][t] == kInf) continue;
        const double v = acc[q - 1][t] + seg_cost(t, s);
        if (v < best) {
          best = v;
          arg = t;
        }
      }
      acc[q][s] = best;
      back[q][s] = static_cast<std::int32_t>(arg);
    }
  }

  std::vector<SNEntry> entries(q_max + 1);
  for (std::int64_t m = 0; m <= q_max; ++m) {
    SNEntry& e = entries[m];
    e.cost = acc[m][n];
    e.feasible = std::isfinite(e.cost);
    if (!e.feasible) continue;
    std::int64_t s = n;
    for (std::int64_t q = m; q >= 1; --q) {
      const std::int64_t t = back[q][s];
      e.changepoints.push_back(t);
      s = t;
    }
    std::reverse(e.changepoints.begin(), e.changepoints.end());
  }
  return entries;
}

Segmentation brute_force_oracle(const CostModel& model, const PenaltyScheme& penalty) {
  check_runnable(model);
  const std::int64_t n = model.n();
  if (n > 20) throw_infeasible("exhaustive search is limited to series of at most 20 observations");
  const std::int64_t ell = model.min_segment_length();

  double best_cost = kInf;
  std::vector<std::int64_t> best_cps;
  std::vector<std::int64_t> cps;

  const std::uint64_t masks = 1ULL << (n - 1);
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    cps.clear();
    std::int64_t last = 0;
    bool ok = true;
    for (std::int64_t t = 1; t <= n - 1; ++t) {
      if (!(mask & (1ULL << (t - 1)))) continue;
      if (t - last < ell) {
        ok = false;
        break;
      }
      cps.push_back(t);
      last = t;
    }
    if (!ok || n - last < ell) continue;

    double cost = penalty.penalty(static_cast<std::int64_t>(cps.size()));
    std::int64_t prev_b = 0;
    for (std::int64_t cp : cps) {
      cost += model.segment_cost(prev_b, cp);
      prev_b = cp;
    }
    cost += model.segment_cost(prev_b, n);

    // On exact cost ties keep the candidate whose reversed changepoint vector
    // is lexicographically smaller; that matches the dynamic programs'
    // smallest-position tie-breaking.
    bool take = cost < best_cost;
    if (!take && cost == best_cost) {
      take = std::lexicographical_compare(cps.rbegin(), cps.rend(), best_cps.rbegin(),
                                          best_cps.rend());
    }
    if (take) {
      best_cost = cost;
      best_cps = cps;
    }
  }
  if (!std::isfinite(best_cost)) {
    throw_infeasible("no admissible segmentation under the minimum segment length");
  }
  return Segmentation(std::move(best_cps), n, best_cost);
}

std::int64_t check_pruning_inequality(const CostModel& model, std::uint64_t seed,
                                      std::int64_t trials, double tol) {
  if (trials < 1) throw_invalid("trials must be positive");
  const std::int64_t n = model.n();
  const std::int64_t ell = model.min_segment_length();
  if (n < 2 * ell) {
    throw_infeasible("series admits no split, nothing to check");
  }
  const double k = model.pruning_constant();
  Rng rng(seed);
  std::int64_t violations = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    const std::int64_t u = rng.uniform_int(2 * ell, n);
    const std::int64_t s = rng.uniform_int(ell, u - ell);
    const std::int64_t t = rng.uniform_int(0, s - ell);
    const double split = model.segment_cost(t, s) + model.segment_cost(s, u) + k;
    if (split > model.segment_cost(t, u) + tol) ++violations;
  }
  return violations;
}

}  // namespace cpd

#include "cpdetect/simeval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "cpdetect/rng.hpp"

namespace cpd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v, int precision) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

}  // namespace

const char* sim_law_name(SimLaw law) noexcept {
  return law == SimLaw::variance ? "variance" : "ar";
}

const char* growth_law_name(GrowthLaw g) noexcept {
  switch (g) {
    case GrowthLaw::linear: return "linear";
    case GrowthLaw::sqrt_n: return "sqrt";
    case GrowthLaw::fixed: return "fixed";
    case GrowthLaw::explicit_count: return "explicit";
  }
  return "?";
}

std::optional<SimLaw> parse_sim_law(std::string_view name) noexcept {
  if (name == "variance") return SimLaw::variance;
  if (name == "ar") return SimLaw::ar;
  return std::nullopt;
}

std::optional<GrowthLaw> parse_growth_law(std::string_view name) noexcept {
  if (name == "linear") return GrowthLaw::linear;
  if (name == "sqrt") return GrowthLaw::sqrt_n;
  if (name == "fixed") return GrowthLaw::fixed;
  if (name == "explicit") return GrowthLaw::explicit_count;
  return std::nullopt;
}

std::int64_t changepoint_count_for(const SimDesign& design) {
  if (design.n < 1) throw_invalid("series length must be positive");
  switch (design.growth) {
    case GrowthLaw::linear: return design.n / 100;
    case GrowthLaw::sqrt_n:
      return static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(design.n)) / 4.0));
    case GrowthLaw::fixed: return 2;
    case GrowthLaw::explicit_count:
      if (design.explicit_m < 0) throw_invalid("explicit changepoint count must be nonnegative");
      return design.explicit_m;
  }
  throw_invalid("unknown growth law");
}

std::int64_t min_gap_for(const SimDesign& design) {
  if (design.min_gap < 0) throw_invalid("min_gap must be nonnegative");
  if (design.min_gap > 0) return design.min_gap;
  return design.law == SimLaw::variance ? 30 : 50;
}

bool ar_coefficients_stationary(const std::vector<double>& phi, double margin) {
  if (!(margin >= 1.0)) throw_invalid("stationarity margin must be at least 1");
  const int p = static_cast<int>(phi.size());
  if (p == 0) return true;
  // Roots of 1 - sum phi_i z^i outside |z| = margin iff the margin-scaled
  // coefficients pass the reflection-coefficient (step-down) test.
  std::vector<double> a(p + 1, 0.0), b(p + 1, 0.0);
  double scale = 1.0;
  for (int i = 1; i <= p; ++i) {
    scale *= margin;
    if (!std::isfinite(phi[i - 1])) throw_invalid("coefficients must be finite");
    a[i] = phi[i - 1] * scale;
  }
  for (int m = p; m >= 1; --m) {
    const double kappa = a[m];
    if (!(std::abs(kappa) < 1.0)) return false;
    const double denom = 1.0 - kappa * kappa;
    for (int i = 1; i < m; ++i) b[i] = (a[i] + kappa * a[m - i]) / denom;
    for (int i = 1; i < m; ++i) a[i] = b[i];
  }
  return true;
}

namespace {

std::vector<std::int64_t> draw_changepoint_positions(Rng& rng, std::int64_t n, std::int64_t m,
                                                     std::int64_t gap) {
  if (m == 0) return {};
  if (n < 6) throw_infeasible("changepoints need at least 6 observations");
  const std::int64_t lo = 3;
  const std::int64_t hi = n - 3 - (m - 1) * (gap - 1);
  if (hi - lo + 1 < m) {
    throw_infeasible("cannot place " + std::to_string(m) + " changepoints with minimum gap " +
                     std::to_string(gap) + " in " + std::to_string(n) + " observations");
  }
  // Draw m distinct positions uniformly in the gap-collapsed range, then
  // expand; this is a bijection onto the gap-constrained vectors, so the
  // result is uniform over them.
  std::vector<std::int64_t> v(m);
  while (true) {
    for (auto& x : v) x = rng.uniform_int(lo, hi);
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) == v.end()) break;
  }
  for (std::int64_t i = 0; i < m; ++i) v[i] += i * (gap - 1);
  return v;
}

}  // namespace

SimResult generate_series(const SimDesign& design) {
  const std::int64_t n = design.n;
  const std::int64_t m = changepoint_count_for(design);
  const std::int64_t gap = min_gap_for(design);
  if (m > 0 && m * gap >= n) {
    throw_infeasible("changepoint count times minimum gap must stay below the series length");
  }

  Rng rng(design.seed);
  std::vector<std::int64_t> cps = draw_changepoint_positions(rng, n, m, gap);

  std::vector<std::int64_t> bounds;
  bounds.push_back(0);
  bounds.insert(bounds.end(), cps.begin(), cps.end());
  bounds.push_back(n);

  std::vector<double> values(n, 0.0);
  std::vector<double> theta(n, 0.0);
  std::vector<SegmentInfo> segments;
  segments.reserve(bounds.size() - 1);

  if (design.law == SimLaw::variance) {
    const double log_sd = std::log(10.0) / 2.0;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
      const double sigma2 = std::exp(rng.normal(0.0, log_sd));
      const double sd = std::sqrt(sigma2);
      for (std::int64_t j = bounds[i]; j < bounds[i + 1]; ++j) {
        values[j] = rng.normal(0.0, sd);
        theta[j] = sigma2;
      }
      SegmentInfo info;
      info.start = bounds[i] + 1;
      info.end = bounds[i + 1];
      info.params = {sigma2};
      segments.push_back(std::move(info));
    }
  } else {
    const double margin = 1.001;
    std::vector<double> phi;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
      const std::int64_t p = rng.uniform_int(0, 3);
      phi.assign(p, 0.0);
      if (p > 0) {
        do {
          for (auto& c : phi) c = rng.normal();
        } while (!ar_coefficients_stationary(phi, margin));
      }
      if (i == 0) {
        // Zero pre-history, 100 discarded burn-in samples.
        const std::int64_t burn = 100;
        const std::int64_t len = bounds[1] - bounds[0];
        std::vector<double> tmp(burn + len);
        for (std::int64_t t = 0; t < burn + len; ++t) {
          double acc = rng.normal();
          for (std::int64_t k = 1; k <= p && t - k >= 0; ++k) acc += phi[k - 1] * tmp[t - k];
          tmp[t] = acc;
        }
        std::copy(tmp.begin() + burn, tmp.end(), values.begin());
      } else {
        // Later segments continue from the realized tail of the previous one;
        // boundaries start at index 3, so the needed history always exists.
        for (std::int64_t j = bounds[i]; j < bounds[i + 1]; ++j) {
          double acc = rng.normal();
          for (std::int64_t k = 1; k <= p; ++k) acc += phi[k - 1] * values[j - k];
          values[j] = acc;
        }
      }
      for (std::int64_t j = bounds[i]; j < bounds[i + 1]; ++j) theta[j] = static_cast<double>(p);
      SegmentInfo info;
      info.start = bounds[i] + 1;
      info.end = bounds[i + 1];
      info.ar_order = static_cast<int>(p);
      info.params = phi;
      info.params.push_back(1.0);  // innovation variance
      segments.push_back(std::move(info));
    }
  }

  return SimResult{TimeSeries(std::move(values)), std::move(cps), std::move(segments),
                   std::move(theta)};
}

EvalReport evaluate(const SimResult& truth, const Segmentation& detected, std::int64_t window,
                    ThetaRule rule) {
  if (window < 0) throw_invalid("matching window must be nonnegative");
  const std::int64_t n = truth.series.length();
  if (detected.n() != n) {
    throw_invalid("detected segmentation does not match the simulated series length");
  }

  const auto& tru = truth.changepoints;
  const auto& det = detected.changepoints();

  struct Pair {
    std::int64_t dist, t_idx, d_idx;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < tru.size(); ++i) {
    for (std::size_t j = 0; j < det.size(); ++j) {
      const std::int64_t dist = std::abs(tru[i] - det[j]);
      if (dist <= window) {
        pairs.push_back({dist, static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.t_idx != b.t_idx) return a.t_idx < b.t_idx;
    return a.d_idx < b.d_idx;
  });
  std::vector<bool> used_t(tru.size(), false), used_d(det.size(), false);
  std::int64_t matches = 0;
  for (const Pair& p : pairs) {
    if (used_t[p.t_idx] || used_d[p.d_idx]) continue;
    used_t[p.t_idx] = true;
    used_d[p.d_idx] = true;
    ++matches;
  }

  EvalReport report;
  report.true_detected = matches;
  report.false_detected = static_cast<std::int64_t>(det.size()) - matches;

  if (rule != ThetaRule::none) {
    if (static_cast<std::int64_t>(truth.theta.size()) != n) {
      throw_invalid("per-observation truth parameters are required for the MSE");
    }
    const auto& y = truth.series.values();
    const auto b = detected.boundaries();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      const double len = static_cast<double>(b[i + 1] - b[i]);
      double sum = 0.0, sum_sq = 0.0;
      for (std::int64_t j = b[i]; j < b[i + 1]; ++j) {
        sum += y[j];
        sum_sq += y[j] * y[j];
      }
      if (rule == ThetaRule::variance_mu0) {
        const double est = sum_sq / len;
        for (std::int64_t j = b[i]; j < b[i + 1]; ++j) {
          const double d = est - truth.theta[j];
          acc += d * d;
        }
      } else {  // meanvar: truth mean is zero by construction
        const double mean = sum / len;
        const double var = std::max(0.0, sum_sq / len - mean * mean);
        for (std::int64_t j = b[i]; j < b[i + 1]; ++j) {
          const double dv = var - truth.theta[j];
          acc += mean * mean + dv * dv;
        }
      }
    }
    report.mse = acc / static_cast<double>(n);
  }
  return report;
}

std::string scenario_label(const SimDesign& design) {
  std::string growth;
  if (design.growth == GrowthLaw::explicit_count) {
    growth = "m" + std::to_string(design.explicit_m);
  } else {
    growth = growth_law_name(design.growth);
  }
  return std::string(sim_law_name(design.law)) + "-" + growth + "-n" + std::to_string(design.n);
}

namespace {

struct MeanSe {
  double mean = kNaN;
  double se = kNaN;
  std::int64_t count = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.count = static_cast<std::int64_t>(xs.size());
  if (r.count == 0) return r;
  r.mean = sum / static_cast<double>(r.count);
  if (r.count >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(r.count - 1)) /
           std::sqrt(static_cast<double>(r.count));
  }
  return r;
}

}  // namespace

BenchResult run_benchmark(const BenchSpec& spec) {
  if (spec.scenarios.empty()) throw_invalid("benchmark needs at least one scenario");
  if (spec.reps < 1) throw_invalid("reps must be positive");
  if (spec.algorithms.empty()) throw_invalid("benchmark needs at least one algorithm");
  bool wants_pelt = false, wants_subbs = false;
  for (const auto& alg : spec.algorithms) {
    if (alg == "pelt") wants_pelt = true;
    else if (alg == "subbs") wants_subbs = true;
    else if (!parse_algorithm(alg)) throw_invalid("unknown benchmark algorithm '" + alg + "'");
  }
  if (wants_subbs && !wants_pelt) {
    throw_invalid("subbs needs pelt in the algorithm list for its changepoint count");
  }

  BenchResult result;
  for (std::size_t si = 0; si < spec.scenarios.size(); ++si) {
    const std::string label = scenario_label(spec.scenarios[si]);
    for (std::int64_t rep = 0; rep < spec.reps; ++rep) {
      SimDesign design = spec.scenarios[si];
      design.seed = mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(si)),
                             static_cast<std::uint64_t>(rep));
      const SimResult sim = generate_series(design);
      const auto model = make_cost_model(sim.series, spec.model);

      double pelt_cost = kNaN;
      std::int64_t pelt_m = -1;

      auto run_one = [&](const std::string& alg) {
        BenchRow row;
        row.scenario = label;
        row.n = design.n;
        row.m_true = static_cast<std::int64_t>(sim.changepoints.size());
        row.algorithm = alg;
        row.rep = rep;
        try {
          DetectConfig cfg;
          cfg.penalty = spec.penalty;
          cfg.sn_max_changepoints = spec.sn_max_changepoints;
          cfg.annotate_segments = false;
          if (alg == "subbs") {
            cfg.algorithm = Algorithm::bs;
            cfg.bs_max_changepoints = pelt_m;
          } else {
            cfg.algorithm = *parse_algorithm(alg);
          }
          const int runs = design.n <= 2000 ? 3 : 1;
          std::vector<double> times;
          std::optional<DetectOutcome> out;
          for (int r = 0; r < runs; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            out = run_detection(*model, cfg);
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
          }
          std::sort(times.begin(), times.end());
          row.runtime_s = times[times.size() / 2];
          row.cost = out->objective;
          const EvalReport ev =
              evaluate(sim, out->segmentation, spec.eval_window, spec.theta_rule);
          row.mse = ev.mse;
          row.true_detected = ev.true_detected;
          row.false_detected = ev.false_detected;
          if (alg == "pelt") {
            pelt_cost = row.cost;
            pelt_m = out->segmentation.num_changepoints();
          }
        } catch (const Error& e) {
          row.ok = false;
          row.error = e.what();
        }
        return row;
      };

      // PELT runs first so dependent rows (subbs forcing its count, cost
      // gaps) can refer to it; rows are still emitted in the listed order.
      std::optional<BenchRow> pelt_row;
      if (wants_pelt) pelt_row = run_one("pelt");
      for (const auto& alg : spec.algorithms) {
        BenchRow row = alg == "pelt" ? *pelt_row : run_one(alg);
        if (row.ok && !std::isnan(pelt_cost)) row.cost_gap = row.cost - pelt_cost;
        result.rows.push_back(std::move(row));
      }
    }
  }

  // Aggregate per (scenario, algorithm) in first-appearance order.
  for (const BenchRow& row : result.rows) {
    auto it = std::find_if(result.groups.begin(), result.groups.end(), [&](const BenchGroup& g) {
      return g.scenario == row.scenario && g.algorithm == row.algorithm;
    });
    if (it == result.groups.end()) {
      BenchGroup g;
      g.scenario = row.scenario;
      g.algorithm = row.algorithm;
      g.n = row.n;
      result.groups.push_back(std::move(g));
    }
  }
  for (BenchGroup& g : result.groups) {
    std::vector<double> runtimes, costs, mses, trues, falses, gaps;
    for (const BenchRow& row : result.rows) {
      if (row.scenario != g.scenario || row.algorithm != g.algorithm || !row.ok) continue;
      runtimes.push_back(row.runtime_s);
      costs.push_back(row.cost);
      if (!std::isnan(row.mse)) mses.push_back(row.mse);
      trues.push_back(static_cast<double>(row.true_detected));
      falses.push_back(static_cast<double>(row.false_detected));
      if (!std::isnan(row.cost_gap)) gaps.push_back(row.cost_gap);
    }
    const MeanSe rt = mean_se(runtimes), c = mean_se(costs), m = mean_se(mses),
                 t = mean_se(trues), f = mean_se(falses), gp = mean_se(gaps);
    g.reps_ok = rt.count;
    g.mean_runtime_s = rt.mean;
    g.se_runtime_s = rt.se;
    g.mean_cost = c.mean;
    g.mean_mse = m.mean;
    g.se_mse = m.se;
    g.mean_true_detected = t.mean;
    g.mean_false_detected = f.mean;
    g.mean_cost_gap = gp.mean;
  }
  return result;
}

std::string bench_csv(const BenchResult& result) {
  std::string out = "scenario,n,m,algorithm,rep,runtime_s,cost,mse,true_det,false_det\n";
  for (const BenchRow& r : result.rows) {
    out += r.scenario;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.m_true);
    out += ',';
    out += r.algorithm;
    out += ',';
    out += std::to_string(r.rep);
    out += ',';
    out += fmt_double(r.runtime_s, 9);
    out += ',';
    out += fmt_double(r.cost, 17);
    out += ',';
    out += fmt_double(r.mse, 17);
    out += ',';
    out += std::to_string(r.true_detected);
    out += ',';
    out += std::to_string(r.false_detected);
    out += '\n';
  }
  return out;
}

std::string bench_summary(const BenchResult& result) {
  std::ostringstream os;
  os << std::left << std::setw(26) << "scenario" << std::setw(8) << "alg" << std::right
     << std::setw(6) << "reps" << std::setw(13) << "runtime_s" << std::setw(11) << "(se)"
     << std::setw(15) << "cost" << std::setw(13) << "mse" << std::setw(11) << "(se)"
     << std::setw(8) << "true" << std::setw(8) << "false" << std::setw(13) << "gap_vs_pelt"
     << '\n';
  for (const BenchGroup& g : result.groups) {
    os << std::left << std::setw(26) << g.scenario << std::setw(8) << g.algorithm << std::right
       << std::setw(6) << g.reps_ok << std::setw(13) << fmt_double(g.mean_runtime_s, 3)
       << std::setw(11) << fmt_double(g.se_runtime_s, 2) << std::setw(15)
       << fmt_double(g.mean_cost, 8) << std::setw(13) << fmt_double(g.mean_mse, 4)
       << std::setw(11) << fmt_double(g.se_mse, 2) << std::setw(8)
       << fmt_double(g.mean_true_detected, 3) << std::setw(8)
       << fmt_double(g.mean_false_detected, 3) << std::setw(13)
       << fmt_double(g.mean_cost_gap, 4) << '\n';
  }
  std::int64_t failures = 0;
  for (const BenchRow& r : result.rows) {
    if (!r.ok) ++failures;
  }
  if (failures > 0) os << failures << " row(s) failed; see the first error below\n";
  for (const BenchRow& r : result.rows) {
    if (!r.ok) {
      os << "  " << r.scenario << "/" << r.algorithm << " rep " << r.rep << ": " << r.error
         << '\n';
      break;
    }
  }
  return os.str();
}

}  // namespace cpd

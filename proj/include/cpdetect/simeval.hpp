#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpdetect/detect.hpp"

namespace cpd {

enum class SimLaw { variance, ar };
enum class GrowthLaw { linear, sqrt_n, fixed, explicit_count };

const char* sim_law_name(SimLaw law) noexcept;
const char* growth_law_name(GrowthLaw g) noexcept;
std::optional<SimLaw> parse_sim_law(std::string_view name) noexcept;
std::optional<GrowthLaw> parse_growth_law(std::string_view name) noexcept;

struct SimDesign {
  std::int64_t n = 1000;
  SimLaw law = SimLaw::variance;
  GrowthLaw growth = GrowthLaw::linear;
  std::int64_t explicit_m = -1;  // used iff growth == explicit_count
  std::int64_t min_gap = 0;      // 0 = law default (variance 30, ar 50)
  std::uint64_t seed = 0;
};

// n/100 for linear, floor(sqrt(n)/4) for sqrt_n, 2 for fixed.
std::int64_t changepoint_count_for(const SimDesign& design);
std::int64_t min_gap_for(const SimDesign& design);

struct SimResult {
  TimeSeries series;
  std::vector<std::int64_t> changepoints;
  std::vector<SegmentInfo> segments;  // true parameters; cost is NaN
  // Per-observation true parameter: the segment variance for the variance
  // law, the autoregressive order for the ar law.
  std::vector<double> theta;
};

// Changepoint locations are uniform over the strictly increasing integer
// vectors in [3, n-3] with consecutive gaps >= min_gap. The variance law
// draws log segment variances from N(0, (log 10 / 2)^2) and fills
// independent centred normals; the ar law draws an order in 0..3 and
// standard-normal coefficients rejected until stationary, each segment
// continuing from the previous one's tail (only the first segment gets a
// 100-sample burn-in).
SimResult generate_series(const SimDesign& design);

// True iff all roots of 1 - sum phi_i z^i lie strictly outside |z| = margin.
bool ar_coefficients_stationary(const std::vector<double>& phi, double margin = 1.001);

enum class ThetaRule { none, variance_mu0, meanvar };

struct EvalReport {
  double mse = std::numeric_limits<double>::quiet_NaN();
  std::int64_t true_detected = 0;
  std::int64_t false_detected = 0;
  double cost_gap = std::numeric_limits<double>::quiet_NaN();
};

// Greedy nearest-first one-to-one matching of detected to true changepoints
// within +/- window. MSE compares per-observation parameter estimates from
// the detected segmentation against the truth: variance_mu0 fits segment
// variances about mean zero, meanvar fits (mean, variance) against (0,
// theta). cost_gap is left NaN; the benchmark fills it.
EvalReport evaluate(const SimResult& truth, const Segmentation& detected,
                    std::int64_t window = 10, ThetaRule rule = ThetaRule::variance_mu0);

struct BenchSpec {
  std::vector<SimDesign> scenarios;          // per-scenario seed fields are ignored
  std::vector<std::string> algorithms;       // pelt | op | bs | sn | subbs
  ModelSpec model;
  std::string penalty = "sic";
  std::int64_t reps = 100;
  std::uint64_t seed = 1;
  std::int64_t sn_max_changepoints = 20;
  std::int64_t eval_window = 10;
  ThetaRule theta_rule = ThetaRule::variance_mu0;
};

struct BenchRow {
  std::string scenario;
  std::int64_t n = 0;
  std::int64_t m_true = 0;
  std::string algorithm;
  std::int64_t rep = 0;
  double runtime_s = std::numeric_limits<double>::quiet_NaN();
  double cost = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  std::int64_t true_detected = 0;
  std::int64_t false_detected = 0;
  double cost_gap = std::numeric_limits<double>::quiet_NaN();
  bool ok = true;
  std::string error;
};

struct BenchGroup {
  std::string scenario;
  std::string algorithm;
  std::int64_t n = 0;
  std::int64_t reps_ok = 0;
  double mean_runtime_s = std::numeric_limits<double>::quiet_NaN();
  double se_runtime_s = std::numeric_limits<double>::quiet_NaN();
  double mean_cost = std::numeric_limits<double>::quiet_NaN();
  double mean_mse = std::numeric_limits<double>::quiet_NaN();
  double se_mse = std::numeric_limits<double>::quiet_NaN();
  double mean_true_detected = std::numeric_limits<double>::quiet_NaN();
  double mean_false_detected = std::numeric_limits<double>::quiet_NaN();
  double mean_cost_gap = std::numeric_limits<double>::quiet_NaN();
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchGroup> groups;
};

// Runs every scenario x rep x algorithm combination on freshly simulated
// data (seeds derived from spec.seed, so reruns are identical). Timing wraps
// the search call only; at n <= 2000 the search is run three times and the
// median taken. "subbs" is binary segmentation forced to the changepoint
// count PELT found on the same rep and requires "pelt" in the algorithm
// list.
BenchResult run_benchmark(const BenchSpec& spec);

std::string scenario_label(const SimDesign& design);
std::string bench_csv(const BenchResult& result);
std::string bench_summary(const BenchResult& result);

}  // namespace cpd

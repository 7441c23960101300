#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpdetect/types.hpp"

namespace cpd {

enum class ModelKind { mean, variance, meanvar, ar_mdl };

const char* model_kind_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

struct ModelSpec {
  ModelKind kind = ModelKind::meanvar;
  // variance model only: the known mean. Defaults to the sample mean.
  std::optional<double> mu;
  // ar_mdl only: largest candidate autoregressive order, 1..32.
  int p_max = 7;
  // Raise-only override of the model's natural minimum segment length.
  std::optional<std::int64_t> min_segment_override;
};

// Prefix sums; aggregates over observations t+1..s come out in O(1) as
// cum[s] - cum[t]. cum_dev_sq (deviations about a fixed mean) is built only
// when that mean is supplied.
struct SummaryStats {
  std::vector<double> cum_sum;
  std::vector<double> cum_sq;
  std::vector<double> cum_dev_sq;
  double fixed_mean = 0.0;

  static SummaryStats build(const std::vector<double>& values, std::optional<double> fixed_mean);

  double sum(std::int64_t t, std::int64_t s) const { return cum_sum[s] - cum_sum[t]; }
  double sum_sq(std::int64_t t, std::int64_t s) const { return cum_sq[s] - cum_sq[t]; }
  double dev_sq(std::int64_t t, std::int64_t s) const { return cum_dev_sq[s] - cum_dev_sq[t]; }
};

// Penalized-likelihood segment cost. Segments are addressed in the dynamic
// programming convention: (t, s) covers observations t+1..s, so lengths are
// s - t and adjacent segments share boundary indices.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual ModelKind kind() const noexcept = 0;
  const char* name() const noexcept { return model_kind_name(kind()); }
  std::int64_t n() const noexcept { return n_; }
  std::int64_t min_segment_length() const noexcept { return min_segment_; }

  // K in the inequality cost(t,s) + cost(s,u) + K <= cost(t,u), required by
  // PELT's pruning rule. Zero for the Gaussian likelihood costs.
  virtual double pruning_constant() const noexcept = 0;

  virtual double segment_cost(std::int64_t t, std::int64_t s) const = 0;
  virtual SegmentInfo fit_segment(std::int64_t t, std::int64_t s) const = 0;
  virtual std::vector<std::string> param_names(const SegmentInfo& fit) const = 0;

  // Parameters added per changepoint; feeds the default AIC/SIC constants.
  virtual int default_penalty_params() const noexcept = 0;

  // False when one evaluation is not O(1); guides segment neighbourhood's
  // decision to pre-tabulate costs.
  virtual bool constant_time_eval() const noexcept { return true; }

 protected:
  CostModel(std::int64_t n, std::int64_t min_segment);
  void check_segment(std::int64_t t, std::int64_t s) const;

  std::int64_t n_ = 0;
  std::int64_t min_segment_ = 1;
};

std::unique_ptr<CostModel> make_cost_model(const TimeSeries& series, const ModelSpec& spec);

// Smallest admissible variance estimate for a series: tiny relative to the
// overall sample variance, strictly positive even for constant data. Degenerate
// segments are clamped here instead of producing -inf costs.
double variance_floor_for(const std::vector<double>& values);

double ar_mdl_pruning_constant(int p_max, std::int64_t n);

struct ArFit {
  int order = 0;
  std::vector<double> coeffs;
  double innovation_variance = 0.0;
  double cost = 0.0;
};

// Minimum-description-length autoregressive fit of observations t+1..s:
// Yule-Walker estimates from biased autocovariances via the Levinson-Durbin
// recursion, scored per order and minimized over 1..p_max. Requires
// s - t >= p_max + 2.
ArFit ar_mdl_fit(const std::vector<double>& values, std::int64_t t, std::int64_t s, int p_max,
                 double variance_floor);

// Penalized objective of a given segmentation under the model: sum of segment
// costs plus penalty(m). Validates segment lengths.
double recompute_cost(const CostModel& model, const Segmentation& seg,
                      const PenaltyScheme& penalty);

}  // namespace cpd

#include "cpdetect/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cpd {

namespace {

constexpr int kMaxArOrder = 32;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);
constexpr double kInf = std::numeric_limits<double>::infinity();

double gaussian_cost(std::int64_t length, double sigma2) {
  return static_cast<double>(length) * (kLog2Pi + std::log(sigma2) + 1.0);
}

}  // namespace

const char* model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::mean: return "mean";
    case ModelKind::variance: return "var";
    case ModelKind::meanvar: return "meanvar";
    case ModelKind::ar_mdl: return "ar-mdl";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  if (name == "mean") return ModelKind::mean;
  if (name == "var" || name == "variance") return ModelKind::variance;
  if (name == "meanvar") return ModelKind::meanvar;
  if (name == "ar-mdl" || name == "ar_mdl" || name == "ar") return ModelKind::ar_mdl;
  return std::nullopt;
}

SummaryStats SummaryStats::build(const std::vector<double>& values,
                                 std::optional<double> fixed_mean) {
  const std::size_t n = values.size();
  SummaryStats s;
  s.cum_sum.assign(n + 1, 0.0);
  s.cum_sq.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s.cum_sum[i + 1] = s.cum_sum[i] + values[i];
    s.cum_sq[i + 1] = s.cum_sq[i] + values[i] * values[i];
  }
  if (fixed_mean) {
    s.fixed_mean = *fixed_mean;
    s.cum_dev_sq.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = values[i] - s.fixed_mean;
      s.cum_dev_sq[i + 1] = s.cum_dev_sq[i] + d * d;
    }
  }
  return s;
}

double variance_floor_for(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  const double sample_var = std::max(0.0, (sum_sq - sum * sum / n) / n);
  return 1e-12 * (sample_var + 1e-300);
}

double ar_mdl_pruning_constant(int p_max, std::int64_t n) {
  return -(2.0 * std::log(static_cast<double>(p_max)) +
           0.5 * static_cast<double>(p_max) * std::log(static_cast<double>(n)));
}

CostModel::CostModel(std::int64_t n, std::int64_t min_segment)
    : n_(n), min_segment_(min_segment) {}

void CostModel::check_segment(std::int64_t t, std::int64_t s) const {
  if (t < 0 || s > n_ || s - t < min_segment_) {
    throw_invalid("segment (" + std::to_string(t) + ", " + std::to_string(s) +
                  "] is out of range or shorter than the minimum length " +
                  std::to_string(min_segment_));
  }
}

namespace {

std::int64_t resolve_min_segment(std::int64_t natural, const ModelSpec& spec) {
  if (!spec.min_segment_override) return natural;
  if (*spec.min_segment_override < natural) {
    throw_invalid("minimum segment length cannot be below the model's natural floor of " +
                  std::to_string(natural));
  }
  return *spec.min_segment_override;
}

class MeanCost final : public CostModel {
 public:
  MeanCost(const TimeSeries& series, const ModelSpec& spec)
      : CostModel(series.length(), resolve_min_segment(1, spec)),
        stats_(SummaryStats::build(series.values(), std::nullopt)) {}

  ModelKind kind() const noexcept override { return ModelKind::mean; }
  double pruning_constant() const noexcept override { return 0.0; }
  int default_penalty_params() const noexcept override { return 1; }

  double segment_cost(std::int64_t t, std::int64_t s) const override {
    check_segment(t, s);
    const double len = static_cast<double>(s - t);
    const double sum = stats_.sum(t, s);
    return std::max(0.0, stats_.sum_sq(t, s) - sum * sum / len);
  }

  SegmentInfo fit_segment(std::int64_t t, std::int64_t s) const override {
    SegmentInfo info;
    info.start = t + 1;
    info.end = s;
    info.cost = segment_cost(t, s);
    info.params = {stats_.sum(t, s) / static_cast<double>(s - t)};
    return info;
  }

  std::vector<std::string> param_names(const SegmentInfo&) const override { return {"mean"}; }

 private:
  SummaryStats stats_;
};

class VarianceCost final : public CostModel {
 public:
  VarianceCost(const TimeSeries& series, const ModelSpec& spec)
      : CostModel(series.length(), resolve_min_segment(2, spec)),
        floor_(variance_floor_for(series.values())) {
    double mu;
    if (spec.mu) {
      if (!std::isfinite(*spec.mu)) throw_invalid("fixed mean must be finite");
      mu = *spec.mu;
    } else {
      double sum = 0.0;
      for (double v : series.values()) sum += v;
      mu = sum / static_cast<double>(series.length());
    }
    stats_ = SummaryStats::build(series.values(), mu);
  }

  ModelKind kind() const noexcept override { return ModelKind::variance; }
  double pruning_constant() const noexcept override { return 0.0; }
  int default_penalty_params() const noexcept override { return 1; }

  double segment_cost(std::int64_t t, std::int64_t s) const override {
    check_segment(t, s);
    return gaussian_cost(s - t, sigma2(t, s));
  }

  SegmentInfo fit_segment(std::int64_t t, std::int64_t s) const override {
    SegmentInfo info;
    info.start = t + 1;
    info.end = s;
    info.cost = segment_cost(t, s);
    info.params = {stats_.fixed_mean, sigma2(t, s)};
    return info;
  }

  std::vector<std::string> param_names(const SegmentInfo&) const override {
    return {"mu", "variance"};
  }

 private:
  double sigma2(std::int64_t t, std::int64_t s) const {
    const double dev = std::max(0.0, stats_.dev_sq(t, s));
    return std::max(dev / static_cast<double>(s - t), floor_);
  }

  SummaryStats stats_;
  double floor_;
};

class MeanVarCost final : public CostModel {
 public:
  MeanVarCost(const TimeSeries& series, const ModelSpec& spec)
      : CostModel(series.length(), resolve_min_segment(2, spec)),
        stats_(SummaryStats::build(series.values(), std::nullopt)),
        floor_(variance_floor_for(series.values())) {}

  ModelKind kind() const noexcept override { return ModelKind::meanvar; }
  double pruning_constant() const noexcept override { return 0.0; }
  int default_penalty_params() const noexcept override { return 2; }

  double segment_cost(std::int64_t t, std::int64_t s) const override {
    check_segment(t, s);
    return gaussian_cost(s - t, sigma2(t, s));
  }

  SegmentInfo fit_segment(std::int64_t t, std::int64_t s) const override {
    SegmentInfo info;
    info.start = t + 1;
    info.end = s;
    info.cost = segment_cost(t, s);
    info.params = {stats_.sum(t, s) / static_cast<double>(s - t), sigma2(t, s)};
    return info;
  }

  std::vector<std::string> param_names(const SegmentInfo&) const override {
    return {"mean", "variance"};
  }

 private:
  double sigma2(std::int64_t t, std::int64_t s) const {
    const double len = static_cast<double>(s - t);
    const double sum = stats_.sum(t, s);
    const double sse = std::max(0.0, stats_.sum_sq(t, s) - sum * sum / len);
    return std::max(sse / len, floor_);
  }

  SummaryStats stats_;
  double floor_;
};

// Shared Levinson-Durbin core. Returns the best MDL score over orders
// 1..p_max; fills order/sigma2 and, when coeffs is non-null, the winning
// coefficients. The prediction-error variance is clamped to the floor both
// for scoring and for the recursion itself, which keeps the step-down stable
// on (near-)deterministic segments.
double ar_mdl_core(const double* y, std::int64_t t, std::int64_t s, int p_max, double floor,
                   int* order, double* sigma2_out, double* coeffs) {
  const std::int64_t len = s - t;
  const double len_d = static_cast<double>(len);

  double mean = 0.0;
  for (std::int64_t j = t; j < s; ++j) mean += y[j];
  mean /= len_d;

  double r[kMaxArOrder + 1];
  for (int k = 0; k <= p_max; ++k) {
    double acc = 0.0;
    for (std::int64_t j = t; j + k < s; ++j) acc += (y[j] - mean) * (y[j + k] - mean);
    r[k] = acc / len_d;
  }

  if (!(r[0] > floor)) {
    // Flat segment: every order reduces to white noise at the floor and the
    // score is increasing in the order.
    *order = 1;
    *sigma2_out = floor;
    if (coeffs) coeffs[0] = 0.0;
    return 0.5 * 3.0 * std::log(len_d) + 0.5 * len_d * std::log(2.0 * std::numbers::pi * floor);
  }

  double phi_prev[kMaxArOrder + 1] = {0.0};
  double phi_cur[kMaxArOrder + 1];
  double pred_var = r[0];
  double best = kInf;
  for (int m = 1; m <= p_max; ++m) {
    double acc = r[m];
    for (int i = 1; i < m; ++i) acc -= phi_prev[i] * r[m - i];
    const double kappa = acc / pred_var;
    phi_cur[m] = kappa;
    for (int i = 1; i < m; ++i) phi_cur[i] = phi_prev[i] - kappa * phi_prev[m - i];
    pred_var *= 1.0 - kappa * kappa;
    if (!(pred_var > floor)) pred_var = floor;

    const double score = std::log(static_cast<double>(m)) +
                         0.5 * static_cast<double>(m + 2) * std::log(len_d) +
                         0.5 * len_d * std::log(2.0 * std::numbers::pi * pred_var);
    if (score < best) {
      best = score;
      *order = m;
      *sigma2_out = pred_var;
      if (coeffs) std::copy(phi_cur + 1, phi_cur + m + 1, coeffs);
    }
    std::copy(phi_cur + 1, phi_cur + m + 1, phi_prev + 1);
  }
  return best;
}

int validated_p_max(const ModelSpec& spec) {
  if (spec.p_max < 1 || spec.p_max > kMaxArOrder) {
    throw_invalid("p_max must lie in [1, " + std::to_string(kMaxArOrder) + "]");
  }
  return spec.p_max;
}

class ArMdlCost final : public CostModel {
 public:
  ArMdlCost(const TimeSeries& series, const ModelSpec& spec)
      : CostModel(series.length(),
                  resolve_min_segment(static_cast<std::int64_t>(validated_p_max(spec)) + 2, spec)),
        values_(series.values()),
        p_max_(spec.p_max),
        floor_(variance_floor_for(series.values())),
        pruning_k_(ar_mdl_pruning_constant(spec.p_max, series.length())) {}

  ModelKind kind() const noexcept override { return ModelKind::ar_mdl; }
  double pruning_constant() const noexcept override { return pruning_k_; }
  int default_penalty_params() const noexcept override { return p_max_ + 1; }
  bool constant_time_eval() const noexcept override { return false; }

  double segment_cost(std::int64_t t, std::int64_t s) const override {
    check_segment(t, s);
    int order;
    double sigma2;
    return ar_mdl_core(values_.data(), t, s, p_max_, floor_, &order, &sigma2, nullptr);
  }

  SegmentInfo fit_segment(std::int64_t t, std::int64_t s) const override {
    check_segment(t, s);
    const ArFit fit = ar_mdl_fit(values_, t, s, p_max_, floor_);
    SegmentInfo info;
    info.start = t + 1;
    info.end = s;
    info.cost = fit.cost;
    info.ar_order = fit.order;
    info.params = fit.coeffs;
    info.params.push_back(fit.innovation_variance);
    return info;
  }

  std::vector<std::string> param_names(const SegmentInfo& fit) const override {
    std::vector<std::string> names;
    for (int i = 1; i <= fit.ar_order; ++i) names.push_back("phi_" + std::to_string(i));
    names.push_back("innovation_variance");
    return names;
  }

 private:
  std::vector<double> values_;
  int p_max_;
  double floor_;
  double pruning_k_;
};

}  // namespace

ArFit ar_mdl_fit(const std::vector<double>& values, std::int64_t t, std::int64_t s, int p_max,
                 double variance_floor) {
  if (p_max < 1 || p_max > kMaxArOrder) {
    throw_invalid("p_max must lie in [1, " + std::to_string(kMaxArOrder) + "]");
  }
  if (t < 0 || s > static_cast<std::int64_t>(values.size()) || s - t < p_max + 2) {
    throw_invalid("autoregressive fit needs a segment of at least p_max + 2 observations");
  }
  ArFit fit;
  double coeffs[kMaxArOrder] = {0.0};
  fit.cost =
      ar_mdl_core(values.data(), t, s, p_max, variance_floor, &fit.order,
                  &fit.innovation_variance, coeffs);
  fit.coeffs.assign(coeffs, coeffs + fit.order);
  return fit;
}

std::unique_ptr<CostModel> make_cost_model(const TimeSeries& series, const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::mean: return std::make_unique<MeanCost>(series, spec);
    case ModelKind::variance: return std::make_unique<VarianceCost>(series, spec);
    case ModelKind::meanvar: return std::make_unique<MeanVarCost>(series, spec);
    case ModelKind::ar_mdl: return std::make_unique<ArMdlCost>(series, spec);
  }
  throw_invalid("unknown model kind");
}

double recompute_cost(const CostModel& model, const Segmentation& seg,
                      const PenaltyScheme& penalty) {
  if (seg.n() != model.n()) {
    throw_invalid("segmentation length does not match the model's series length");
  }
  if (seg.shortest_segment_length() < model.min_segment_length()) {
    throw_invalid("segmentation violates the model's minimum segment length");
  }
  const auto b = seg.boundaries();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) total += model.segment_cost(b[i], b[i + 1]);
  return total + penalty.penalty(seg.num_changepoints());
}

}  // namespace cpd

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cpdetect/error.hpp"

namespace cpd {

// Ordered observations y_1..y_n (1-based throughout the public interface).
// Values are validated finite on construction. Timestamps, when present, are
// display-only labels and must be strictly increasing and the same length.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, std::vector<double> timestamps = {});

  std::int64_t length() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  const std::vector<double>& values() const noexcept { return values_; }
  bool has_timestamps() const noexcept { return !timestamps_.empty(); }
  const std::vector<double>& timestamps() const noexcept { return timestamps_; }

  // First differences applied `order` times; timestamps are dropped.
  TimeSeries differenced(int order) const;

 private:
  std::vector<double> values_;
  std::vector<double> timestamps_;
};

// One fitted (or true) segment covering observations start..end, 1-based
// inclusive. `params` are model-specific in a fixed documented order;
// ar_order is -1 for non-autoregressive models.
struct SegmentInfo {
  std::int64_t start = 0;
  std::int64_t end = 0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  int ar_order = -1;
  std::vector<double> params;
};

// A set of changepoints over a series of length n. A changepoint at index t
// (1 <= t <= n-1) marks a boundary after observation t: the data splits into
// segments [1..t1], [t1+1..t2], ..., [tm+1..n]. Indices are strictly
// increasing; total_cost is the penalized objective value of the producing
// search (NaN when not applicable, e.g. simulated truth).
class Segmentation {
 public:
  Segmentation(std::vector<std::int64_t> changepoints, std::int64_t n, double total_cost);

  const std::vector<std::int64_t>& changepoints() const noexcept { return changepoints_; }
  std::int64_t n() const noexcept { return n_; }
  std::int64_t num_changepoints() const noexcept {
    return static_cast<std::int64_t>(changepoints_.size());
  }
  std::int64_t num_segments() const noexcept { return num_changepoints() + 1; }
  double total_cost() const noexcept { return total_cost_; }

  // Half-open boundary list 0 = b_0 < b_1 < ... < b_{m+1} = n; segment i is
  // observations (b_i, b_{i+1}] in 1-based terms.
  std::vector<std::int64_t> boundaries() const;
  std::int64_t shortest_segment_length() const;

  // Optional per-segment annotations (fits, costs); filled by callers.
  const std::vector<SegmentInfo>& segments() const noexcept { return segments_; }
  void set_segments(std::vector<SegmentInfo> segments);
  void set_total_cost(double cost) noexcept { total_cost_ = cost; }

 private:
  std::vector<std::int64_t> changepoints_;
  std::int64_t n_ = 0;
  double total_cost_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<SegmentInfo> segments_;
};

// Penalty on the number of changepoints m: penalty(m) = beta * f(m) with
// f(0) = 0. Constant schemes have f(m) = m, so the penalty is linear and the
// single-pass dynamic programs apply directly; concave schemes (f increasing,
// f' positive nonincreasing) are handled by the iterative wrapper in
// penalty.hpp. fprime(m) for m < 1 reports fprime(1), the iteration's
// starting slope.
class PenaltyScheme {
 public:
  static PenaltyScheme constant(double beta, std::string name);
  static PenaltyScheme concave(std::string name, double scale, std::function<double(double)> f,
                               std::function<double(double)> fprime);

  bool is_constant() const noexcept { return constant_; }
  double beta() const noexcept { return beta_; }
  const std::string& name() const noexcept { return name_; }

  double f(std::int64_t m) const;
  double fprime(std::int64_t m) const;
  double penalty(std::int64_t m) const { return beta_ * f(m); }

 private:
  PenaltyScheme() = default;
  bool constant_ = true;
  double beta_ = 0.0;
  std::string name_;
  std::function<double(double)> f_;
  std::function<double(double)> fprime_;
};

}  // namespace cpd

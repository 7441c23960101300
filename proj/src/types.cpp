#include "cpdetect/types.hpp"

#include <algorithm>
#include <cmath>

namespace cpd {

TimeSeries::TimeSeries(std::vector<double> values, std::vector<double> timestamps)
    : values_(std::move(values)), timestamps_(std::move(timestamps)) {
  if (values_.empty()) throw_invalid("time series must contain at least one observation");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw_nonfinite("non-finite value at position " + std::to_string(i + 1));
    }
  }
  if (!timestamps_.empty()) {
    if (timestamps_.size() != values_.size()) {
      throw_invalid("timestamps must match the number of observations");
    }
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
      if (!std::isfinite(timestamps_[i])) {
        throw_nonfinite("non-finite timestamp at position " + std::to_string(i + 1));
      }
      if (i > 0 && !(timestamps_[i - 1] < timestamps_[i])) {
        throw_invalid("timestamps must be strictly increasing");
      }
    }
  }
}

TimeSeries TimeSeries::differenced(int order) const {
  if (order < 1) throw_invalid("difference order must be at least 1");
  if (length() <= order) {
    throw_infeasible("series too short to difference " + std::to_string(order) + " time(s)");
  }
  std::vector<double> out = values_;
  for (int k = 0; k < order; ++k) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return TimeSeries(std::move(out));
}

Segmentation::Segmentation(std::vector<std::int64_t> changepoints, std::int64_t n,
                           double total_cost)
    : changepoints_(std::move(changepoints)), n_(n), total_cost_(total_cost) {
  if (n_ < 1) throw_invalid("segmentation requires a positive series length");
  for (std::size_t i = 0; i < changepoints_.size(); ++i) {
    if (changepoints_[i] < 1 || changepoints_[i] > n_ - 1) {
      throw_invalid("changepoint index out of range [1, n-1]");
    }
    if (i > 0 && changepoints_[i - 1] >= changepoints_[i]) {
      throw_invalid("changepoints must be strictly increasing");
    }
  }
}

std::vector<std::int64_t> Segmentation::boundaries() const {
  std::vector<std::int64_t> b;
  b.reserve(changepoints_.size() + 2);
  b.push_back(0);
  b.insert(b.end(), changepoints_.begin(), changepoints_.end());
  b.push_back(n_);
  return b;
}

std::int64_t Segmentation::shortest_segment_length() const {
  const auto b = boundaries();
  std::int64_t shortest = n_;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) shortest = std::min(shortest, b[i + 1] - b[i]);
  return shortest;
}

void Segmentation::set_segments(std::vector<SegmentInfo> segments) {
  if (static_cast<std::int64_t>(segments.size()) != num_segments()) {
    throw_invalid("segment annotation count must equal the number of segments");
  }
  segments_ = std::move(segments);
}

PenaltyScheme PenaltyScheme::constant(double beta, std::string name) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw_invalid("penalty constant must be finite and nonnegative");
  }
  PenaltyScheme s;
  s.constant_ = true;
  s.beta_ = beta;
  s.name_ = std::move(name);
  return s;
}

PenaltyScheme PenaltyScheme::concave(std::string name, double scale,
                                     std::function<double(double)> f,
                                     std::function<double(double)> fprime) {
  if (!std::isfinite(scale) || scale < 0.0) {
    throw_invalid("penalty scale must be finite and nonnegative");
  }
  if (!f || !fprime) throw_invalid("concave penalty requires f and f'");
  PenaltyScheme s;
  s.constant_ = false;
  s.beta_ = scale;
  s.name_ = std::move(name);
  s.f_ = std::move(f);
  s.fprime_ = std::move(fprime);
  return s;
}

double PenaltyScheme::f(std::int64_t m) const {
  if (m <= 0) return 0.0;
  return constant_ ? static_cast<double>(m) : f_(static_cast<double>(m));
}

double PenaltyScheme::fprime(std::int64_t m) const {
  if (constant_) return 1.0;
  return fprime_(static_cast<double>(m < 1 ? 1 : m));
}

}  // namespace cpd

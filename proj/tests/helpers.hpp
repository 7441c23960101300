// Shared test utilities. The oracle_* functions are deliberately independent
// reimplementations (direct two-pass sums, Gaussian elimination instead of
// the recursion) so the library is checked against them, not against itself.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cpdetect/costs.hpp"
#include "cpdetect/rng.hpp"

namespace testutil {

inline double segment_mean(const std::vector<double>& y, std::int64_t t, std::int64_t s) {
  double sum = 0.0;
  for (std::int64_t j = t; j < s; ++j) sum += y[j];
  return sum / static_cast<double>(s - t);
}

// Sum of squared deviations about the segment mean, two-pass.
inline double oracle_mean_cost(const std::vector<double>& y, std::int64_t t, std::int64_t s) {
  const double mean = segment_mean(y, t, s);
  double acc = 0.0;
  for (std::int64_t j = t; j < s; ++j) acc += (y[j] - mean) * (y[j] - mean);
  return acc;
}

inline double oracle_gaussian_cost(std::int64_t len, double sigma2) {
  return static_cast<double>(len) *
         (std::log(2.0 * std::numbers::pi) + std::log(sigma2) + 1.0);
}

inline double oracle_var_cost(const std::vector<double>& y, std::int64_t t, std::int64_t s,
                              double mu, double floor) {
  double dev = 0.0;
  for (std::int64_t j = t; j < s; ++j) dev += (y[j] - mu) * (y[j] - mu);
  const double sigma2 = std::max(dev / static_cast<double>(s - t), floor);
  return oracle_gaussian_cost(s - t, sigma2);
}

inline double oracle_meanvar_cost(const std::vector<double>& y, std::int64_t t, std::int64_t s,
                                  double floor) {
  const double sse = oracle_mean_cost(y, t, s);
  const double sigma2 = std::max(sse / static_cast<double>(s - t), floor);
  return oracle_gaussian_cost(s - t, sigma2);
}

inline std::vector<double> oracle_autocov(const std::vector<double>& y, std::int64_t t,
                                          std::int64_t s, int max_lag) {
  const double mean = segment_mean(y, t, s);
  std::vector<double> r(max_lag + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::int64_t j = t; j + k < s; ++j) acc += (y[j] - mean) * (y[j + k] - mean);
    r[k] = acc / static_cast<double>(s - t);
  }
  return r;
}

// Solves the order-p Yule-Walker system by Gaussian elimination with partial
// pivoting; returns false if singular.
inline bool solve_yule_walker(const std::vector<double>& r, int p, std::vector<double>* phi) {
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a[i][j] = r[std::abs(i - j)];
    a[i][p] = r[i + 1];
  }
  for (int col = 0; col < p; ++col) {
    int pivot = col;
    for (int row = col + 1; row < p; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    for (int row = col + 1; row < p; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int j = col; j <= p; ++j) a[row][j] -= f * a[col][j];
    }
  }
  phi->assign(p, 0.0);
  for (int i = p - 1; i >= 0; --i) {
    double acc = a[i][p];
    for (int j = i + 1; j < p; ++j) acc -= a[i][j] * (*phi)[j];
    (*phi)[i] = acc / a[i][i];
  }
  return true;
}

struct OracleArFit {
  int order = 0;
  std::vector<double> phi;
  double sigma2 = 0.0;
  double cost = 0.0;
};

// Minimum-description-length autoregressive score, solved independently per
// order via Gaussian elimination on the Yule-Walker system.
inline OracleArFit oracle_ar_cost(const std::vector<double>& y, std::int64_t t, std::int64_t s,
                                  int p_max, double floor) {
  const double len = static_cast<double>(s - t);
  const auto r = oracle_autocov(y, t, s, p_max);
  OracleArFit best;
  best.cost = std::numeric_limits<double>::infinity();
  if (!(r[0] > floor)) {
    best.order = 1;
    best.phi = {0.0};
    best.sigma2 = floor;
    best.cost = 1.5 * std::log(len) +
                0.5 * len * std::log(2.0 * std::numbers::pi * floor);
    return best;
  }
  for (int p = 1; p <= p_max; ++p) {
    std::vector<double> phi;
    if (!solve_yule_walker(r, p, &phi)) continue;
    double sigma2 = r[0];
    for (int i = 0; i < p; ++i) sigma2 -= phi[i] * r[i + 1];
    sigma2 = std::max(sigma2, floor);
    const double cost = std::log(static_cast<double>(p)) +
                        0.5 * static_cast<double>(p + 2) * std::log(len) +
                        0.5 * len * std::log(2.0 * std::numbers::pi * sigma2);
    if (cost < best.cost) {
      best.order = p;
      best.phi = phi;
      best.sigma2 = sigma2;
      best.cost = cost;
    }
  }
  return best;
}

// Durand-Kerner root finder for 1 - phi_1 z - ... - phi_p z^p, used to check
// stationarity claims without the step-down recursion.
inline std::vector<std::complex<double>> char_poly_roots(const std::vector<double>& phi) {
  const int p = static_cast<int>(phi.size());
  // coefficients c_0 + c_1 z + ... + c_p z^p
  std::vector<std::complex<double>> c(p + 1);
  c[0] = 1.0;
  for (int i = 1; i <= p; ++i) c[i] = -phi[i - 1];
  while (c.size() > 1 && std::abs(c.back()) < 1e-14) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  for (auto& coef : c) coef /= c[deg];

  auto eval = [&](std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (int i = deg; i >= 0; --i) acc = acc * z + c[i];
    return acc;
  };
  std::vector<std::complex<double>> roots(deg);
  for (int i = 0; i < deg; ++i) {
    roots[i] = std::pow(std::complex<double>(0.4, 0.9), i + 1);
  }
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < deg; ++i) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < deg; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const std::complex<double> delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-13) break;
  }
  return roots;
}

// Standard-normal draws with a fixed seed for test data.
inline std::vector<double> normal_data(std::uint64_t seed, std::int64_t n, double sd = 1.0) {
  cpd::Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = rng.normal(0.0, sd);
  return y;
}

// Piecewise series: `segments` holds (length, mean, sd) triples.
inline std::vector<double> piecewise_normal(std::uint64_t seed,
                                            const std::vector<std::tuple<int, double, double>>&
                                                segments) {
  cpd::Rng rng(seed);
  std::vector<double> y;
  for (const auto& [len, mean, sd] : segments) {
    for (int i = 0; i < len; ++i) y.push_back(rng.normal(mean, sd));
  }
  return y;
}

inline bool close(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return false;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testutil

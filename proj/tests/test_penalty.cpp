#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpdetect/costs.hpp"
#include "cpdetect/error.hpp"
#include "cpdetect/penalty.hpp"
#include "cpdetect/rng.hpp"
#include "helpers.hpp"

using cpd::ConcaveStatus;
using cpd::ConstantPenaltyKind;
using cpd::Error;
using cpd::make_cost_model;
using cpd::ModelKind;
using cpd::ModelSpec;
using cpd::PenaltyScheme;
using cpd::TimeSeries;
using testutil::close;

namespace {

ModelSpec spec_of(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  return spec;
}

}  // namespace

TEST_CASE("information-criterion constants") {
  for (const int p : {1, 2, 3, 5}) {
    for (const std::int64_t n : {std::int64_t{10}, std::int64_t{100}, std::int64_t{1000},
                                 std::int64_t{20000}}) {
      const auto sic = cpd::make_constant_penalty(ConstantPenaltyKind::sic, p, n);
      CHECK(sic.beta() == static_cast<double>(p) * std::log(static_cast<double>(n)));
      const auto aic = cpd::make_constant_penalty(ConstantPenaltyKind::aic, p, n);
      CHECK(aic.beta() == 2.0 * static_cast<double>(p));
    }
  }
  const auto manual = cpd::make_constant_penalty(ConstantPenaltyKind::manual, 1, 100, 7.5);
  CHECK(manual.beta() == 7.5);

  CHECK_THROWS_AS(cpd::make_constant_penalty(ConstantPenaltyKind::sic, 0, 100), Error);
  CHECK_THROWS_AS(cpd::make_constant_penalty(ConstantPenaltyKind::sic, 1, 1), Error);
  CHECK_THROWS_AS(cpd::make_constant_penalty(ConstantPenaltyKind::aic, 0, 100), Error);
  CHECK_THROWS_AS(cpd::make_constant_penalty(ConstantPenaltyKind::manual, 1, 100), Error);
  CHECK_THROWS_AS(cpd::make_constant_penalty(ConstantPenaltyKind::manual, 1, 100, -2.0), Error);
}

TEST_CASE("penalty registry resolves names against the model") {
  const TimeSeries ts(testutil::normal_data(17, 200));
  const auto mv = make_cost_model(ts, spec_of(ModelKind::meanvar));

  const auto sic = cpd::parse_penalty_spec("sic", *mv);
  CHECK(sic.beta() == 2.0 * std::log(200.0));
  CHECK(sic.is_constant());

  const auto aic = cpd::parse_penalty_spec("aic", *mv);
  CHECK(aic.beta() == 4.0);

  const auto manual = cpd::parse_penalty_spec("manual:3.25", *mv);
  CHECK(manual.beta() == 3.25);
  CHECK(cpd::parse_penalty_spec("manual:0", *mv).beta() == 0.0);

  // concave specs default their scale to the model's SIC constant
  const auto sq = cpd::parse_penalty_spec("concave:sqrt", *mv);
  CHECK(!sq.is_constant());
  CHECK(sq.beta() == 2.0 * std::log(200.0));
  CHECK(sq.f(4) == doctest::Approx(2.0));

  const auto lg = cpd::parse_penalty_spec("concave:log", *mv);
  CHECK(lg.f(0) == 0.0);
  CHECK(lg.f(1) == doctest::Approx(std::log(2.0)));

  const auto mdl = cpd::parse_penalty_spec("mdl", *mv);
  CHECK(!mdl.is_constant());

  CHECK_THROWS_AS(cpd::parse_penalty_spec("bogus", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("manual:", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("manual:abc", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("manual:1.5x", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("manual:-3", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("manual:inf", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("concave:cube", *mv), Error);
  CHECK_THROWS_AS(cpd::parse_penalty_spec("", *mv), Error);
}

TEST_CASE("description-length penalty follows its closed form") {
  const std::int64_t n = 500;
  const auto mdl = cpd::make_mdl_penalty(n);
  const double logn = std::log(static_cast<double>(n));
  CHECK(mdl.f(0) == 0.0);
  CHECK(mdl.f(1) == doctest::Approx(logn).epsilon(1e-12));
  CHECK(mdl.f(5) == doctest::Approx(std::log(5.0) + 5.0 * logn).epsilon(1e-12));
  CHECK(mdl.fprime(3) == doctest::Approx(1.0 / 3.0 + logn).epsilon(1e-12));
  CHECK(mdl.fprime(0) == mdl.fprime(1));
  CHECK(mdl.beta() == 1.0);
  CHECK_THROWS_AS(cpd::make_mdl_penalty(1), Error);
}

TEST_CASE("concave schemes are increasing with nonincreasing positive slope") {
  const std::vector<PenaltyScheme> schemes = {
      cpd::make_concave_sqrt(3.0), cpd::make_concave_log(2.0), cpd::make_mdl_penalty(300)};
  for (const auto& scheme : schemes) {
    CHECK(scheme.f(0) == 0.0);
    double prev_f = 0.0;
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::int64_t m = 1; m <= 40; ++m) {
      CHECK(scheme.f(m) > prev_f);
      const double slope = scheme.fprime(m);
      CHECK(slope > 0.0);
      CHECK(slope <= prev_slope + 1e-15);
      prev_f = scheme.f(m);
      prev_slope = slope;
    }
  }
}

TEST_CASE("iteration on a linear penalty converges immediately to the exact answer") {
  const auto y = testutil::piecewise_normal(23, {{80, 0.0, 1.0}, {80, 3.0, 1.0}, {80, 0.5, 2.0}});
  const TimeSeries ts(y);
  const auto model = make_cost_model(ts, spec_of(ModelKind::meanvar));
  const double beta = 2.0 * std::log(240.0);
  const auto linear = PenaltyScheme::constant(beta, "manual");

  const auto result = cpd::concave_iteration(*model, linear);
  CHECK(result.status == ConcaveStatus::converged);
  CHECK(result.iterations() <= 2);

  const auto direct = cpd::pelt(*model, beta);
  CHECK(result.segmentation.changepoints() == direct.segmentation.changepoints());
  CHECK(close(result.score, direct.segmentation.total_cost(), 1e-9));
}

TEST_CASE("the first iterate solves the starting-slope problem exactly") {
  const auto y = testutil::piecewise_normal(29, {{100, 0.0, 1.0}, {100, 0.0, 4.0}});
  const TimeSeries ts(y);
  ModelSpec spec = spec_of(ModelKind::variance);
  spec.mu = 0.0;
  const auto model = make_cost_model(ts, spec);
  const auto scheme = cpd::make_concave_sqrt(2.0 * std::log(200.0));

  const auto result = cpd::concave_iteration(*model, scheme);
  REQUIRE(!result.trace.empty());
  const double gamma0 = scheme.beta() * scheme.fprime(1);
  CHECK(result.trace.front().gamma == doctest::Approx(gamma0).epsilon(1e-12));
  const auto first = cpd::pelt(*model, gamma0);
  CHECK(result.trace.front().num_changepoints == first.segmentation.num_changepoints());
}

TEST_CASE("iteration scores never beat the exhaustive concave optimum") {
  cpd::Rng rng(404);
  int exact_hits = 0;
  const int trials = 60;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> y;
    const auto split = rng.uniform_int(4, 8);
    const double sd2 = std::exp(rng.normal(0.0, 1.0));
    for (std::int64_t i = 0; i < 12; ++i) {
      y.push_back(rng.normal(0.0, i < split ? 1.0 : sd2));
    }
    const TimeSeries ts(y);
    ModelSpec spec = spec_of(ModelKind::variance);
    spec.mu = 0.0;
    const auto model = make_cost_model(ts, spec);
    const auto scheme = cpd::make_concave_sqrt(1.0 + 5.0 * rng.uniform01());

    const auto exact_seg = cpd::brute_force_oracle(*model, scheme);
    const double exact_score = cpd::recompute_cost(*model, exact_seg, scheme);
    const auto iter = cpd::concave_iteration(*model, scheme);

    CHECK(iter.score >= exact_score - 1e-9);
    if (std::abs(iter.score - exact_score) <= 1e-9) ++exact_hits;

    // trace invariants: scores consistent, best-so-far monotone
    double best = std::numeric_limits<double>::infinity();
    for (const auto& it : iter.trace) {
      best = std::min(best, it.score);
      CHECK(it.best_so_far == doctest::Approx(best).epsilon(1e-12));
    }
  }
  CHECK(exact_hits >= trials * 7 / 10);
}

TEST_CASE("iteration cap reports the best iterate seen") {
  const auto y = testutil::piecewise_normal(
      31, {{60, 0.0, 1.0}, {60, 0.0, 3.0}, {60, 0.0, 0.4}, {60, 0.0, 2.0}});
  const TimeSeries ts(y);
  ModelSpec spec = spec_of(ModelKind::variance);
  spec.mu = 0.0;
  const auto model = make_cost_model(ts, spec);
  const auto scheme = cpd::make_concave_sqrt(std::log(240.0));

  const auto capped = cpd::concave_iteration(*model, scheme, 1);
  CHECK(capped.iterations() == 1);
  if (capped.status == ConcaveStatus::iteration_limit) {
    CHECK(capped.score == doctest::Approx(capped.trace.back().best_so_far));
  }
  const double score_check = cpd::recompute_cost(*model, capped.segmentation, scheme);
  CHECK(close(capped.score, score_check, 1e-9));

  CHECK_THROWS_AS(cpd::concave_iteration(*model, scheme, 0), Error);
}

TEST_CASE("exact concave optimum by segment-count enumeration") {
  cpd::Rng rng(505);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> y;
    for (std::int64_t i = 0; i < 12; ++i) {
      y.push_back(rng.normal(i < 6 ? 0.0 : 3.0, 1.0));
    }
    const TimeSeries ts(y);
    const auto model = make_cost_model(ts, spec_of(ModelKind::meanvar));

    const std::vector<PenaltyScheme> schemes = {
        PenaltyScheme::constant(1.0 + 8.0 * rng.uniform01(), "manual"),
        cpd::make_concave_sqrt(1.0 + 8.0 * rng.uniform01()),
        cpd::make_mdl_penalty(12)};
    for (const auto& scheme : schemes) {
      const auto exact_seg = cpd::brute_force_oracle(*model, scheme);
      const double exact_score = cpd::recompute_cost(*model, exact_seg, scheme);
      const auto sn_opt = cpd::exact_penalized_optimum(*model, scheme, 5);
      CHECK(close(sn_opt.score, exact_score, 1e-9));
      CHECK(sn_opt.segmentation.changepoints() == exact_seg.changepoints());
    }
  }
}

TEST_CASE("exact optimum prefers fewer changepoints on ties") {
  const TimeSeries ts({4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0});
  const auto model = make_cost_model(ts, spec_of(ModelKind::mean));
  // zero penalty: every feasible count costs exactly zero
  const auto opt = cpd::exact_penalized_optimum(
      *model, PenaltyScheme::constant(0.0, "manual"), 5);
  CHECK(opt.num_changepoints == 0);
  CHECK(opt.segmentation.num_changepoints() == 0);
}

TEST_CASE("status names are stable") {
  CHECK(std::string(cpd::concave_status_name(ConcaveStatus::converged)) == "converged");
  CHECK(std::string(cpd::concave_status_name(ConcaveStatus::cycled)) == "cycled");
  CHECK(std::string(cpd::concave_status_name(ConcaveStatus::iteration_limit)) ==
        "iteration-limit");
}

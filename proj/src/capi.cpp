#include "cpdetect.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "cpdetect/simeval.hpp"

namespace {

thread_local std::string g_last_error;

cpd_status to_status(cpd::ErrorCode code) {
  switch (code) {
    case cpd::ErrorCode::invalid_argument: return CPD_ERR_INVALID_ARGUMENT;
    case cpd::ErrorCode::nonfinite_data: return CPD_ERR_NONFINITE_DATA;
    case cpd::ErrorCode::infeasible: return CPD_ERR_INFEASIBLE;
    case cpd::ErrorCode::internal: return CPD_ERR_INTERNAL;
  }
  return CPD_ERR_INTERNAL;
}

cpd_status fail(cpd_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into statuses.
template <typename Fn>
cpd_status guarded(Fn&& body) {
  try {
    return body();
  } catch (const cpd::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CPD_ERR_NOMEM;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CPD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CPD_ERR_INTERNAL;
  }
}

void copy_segment(const cpd::SegmentInfo& info, cpd_segment* out) {
  out->start = info.start;
  out->end = info.end;
  out->cost = info.cost;
  out->ar_order = info.ar_order;
  out->num_params = static_cast<int32_t>(info.params.size());
  for (std::size_t i = 0; i < info.params.size() && i < CPD_MAX_SEGMENT_PARAMS; ++i) {
    out->params[i] = info.params[i];
  }
}

void copy_string(const std::string& s, char* out, std::size_t cap) {
  const std::size_t len = std::min(s.size(), cap - 1);
  std::memcpy(out, s.data(), len);
  out[len] = '\0';
}

std::optional<cpd::ThetaRule> parse_theta_rule(const char* name) {
  if (!name) return std::nullopt;
  const std::string_view v(name);
  if (v == "none") return cpd::ThetaRule::none;
  if (v == "variance") return cpd::ThetaRule::variance_mu0;
  if (v == "meanvar") return cpd::ThetaRule::meanvar;
  return std::nullopt;
}

cpd::ModelSpec to_model_spec(const cpd_options* options) {
  cpd::ModelSpec spec;
  const auto kind = options->model ? cpd::parse_model_kind(options->model) : std::nullopt;
  if (!kind) {
    throw cpd::Error(cpd::ErrorCode::invalid_argument,
                     "unknown model; expected mean | var | meanvar | ar-mdl");
  }
  spec.kind = *kind;
  spec.p_max = options->p_max;
  if (!std::isnan(options->mu)) spec.mu = options->mu;
  if (options->min_segment < 0) {
    throw cpd::Error(cpd::ErrorCode::invalid_argument, "min_segment must be nonnegative");
  }
  if (options->min_segment > 0) spec.min_segment_override = options->min_segment;
  return spec;
}

cpd::SimDesign to_sim_design(const cpd_sim_design* design) {
  cpd::SimDesign d;
  d.n = design->n;
  const auto law = design->law ? cpd::parse_sim_law(design->law) : std::nullopt;
  if (!law) {
    throw cpd::Error(cpd::ErrorCode::invalid_argument,
                     "unknown simulation law; expected variance | ar");
  }
  d.law = *law;
  const auto growth = design->growth ? cpd::parse_growth_law(design->growth) : std::nullopt;
  if (!growth) {
    throw cpd::Error(cpd::ErrorCode::invalid_argument,
                     "unknown growth law; expected linear | sqrt | fixed | explicit");
  }
  d.growth = *growth;
  d.explicit_m = design->m;
  d.min_gap = design->min_gap;
  d.seed = design->seed;
  return d;
}

cpd_status string_out(const std::string& s, char** out) {
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) return fail(CPD_ERR_NOMEM, "out of memory");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  *out = buf;
  return CPD_OK;
}

}  // namespace

struct cpd_series {
  cpd::TimeSeries series;
};

struct cpd_result {
  cpd::DetectOutcome outcome;
  // param_name needs stable storage for the returned pointer
  mutable std::string name_buffer;
  std::unique_ptr<cpd::CostModel> model;
};

struct cpd_sim {
  cpd::SimResult result;
};

struct cpd_bench {
  cpd::BenchResult result;
};

extern "C" {

const char* cpd_version(void) { return "1.0.0"; }

const char* cpd_status_name(cpd_status status) {
  switch (status) {
    case CPD_OK: return "ok";
    case CPD_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CPD_ERR_NONFINITE_DATA: return "nonfinite-data";
    case CPD_ERR_INFEASIBLE: return "infeasible";
    case CPD_ERR_NOMEM: return "out-of-memory";
    case CPD_ERR_INTERNAL: return "internal";
  }
  return "?";
}

const char* cpd_last_error(void) { return g_last_error.c_str(); }

cpd_status cpd_series_create(const double* values, size_t count, cpd_series** out) {
  if (!values || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() {
    auto handle = std::make_unique<cpd_series>(
        cpd_series{cpd::TimeSeries(std::vector<double>(values, values + count))});
    *out = handle.release();
    return CPD_OK;
  });
}

cpd_status cpd_series_diff(const cpd_series* series, int order, cpd_series** out) {
  if (!series || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() {
    auto handle = std::make_unique<cpd_series>(cpd_series{series->series.differenced(order)});
    *out = handle.release();
    return CPD_OK;
  });
}

void cpd_series_destroy(cpd_series* series) { delete series; }

int64_t cpd_series_length(const cpd_series* series) { return series ? series->series.length() : 0; }

const double* cpd_series_values(const cpd_series* series, size_t* count) {
  if (!series) {
    if (count) *count = 0;
    return nullptr;
  }
  if (count) *count = series->series.values().size();
  return series->series.values().data();
}

void cpd_options_init(cpd_options* options) {
  if (!options) return;
  options->model = "meanvar";
  options->penalty = "sic";
  options->algorithm = "pelt";
  options->p_max = 7;
  options->mu = std::numeric_limits<double>::quiet_NaN();
  options->min_segment = 0;
  options->sn_max_changepoints = 20;
  options->bs_max_changepoints = -1;
  options->max_iterations = 20;
}

cpd_status cpd_detect(const cpd_series* series, const cpd_options* options, cpd_result** out) {
  if (!series || !options || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() {
    const cpd::ModelSpec model_spec = to_model_spec(options);

    cpd::DetectConfig config;
    config.penalty = options->penalty ? options->penalty : "sic";
    const auto algorithm =
        options->algorithm ? cpd::parse_algorithm(options->algorithm) : std::nullopt;
    if (!algorithm) {
      throw cpd::Error(cpd::ErrorCode::invalid_argument,
                       "unknown algorithm; expected pelt | op | bs | sn");
    }
    config.algorithm = *algorithm;
    config.sn_max_changepoints = options->sn_max_changepoints;
    if (options->bs_max_changepoints >= 0) {
      config.bs_max_changepoints = options->bs_max_changepoints;
    }
    config.max_iterations = options->max_iterations;

    auto model = cpd::make_cost_model(series->series, model_spec);
    auto handle = std::make_unique<cpd_result>(
        cpd_result{cpd::run_detection(*model, config), {}, nullptr});
    handle->model = std::move(model);
    *out = handle.release();
    return CPD_OK;
  });
}

void cpd_result_destroy(cpd_result* result) { delete result; }

const int64_t* cpd_result_changepoints(const cpd_result* result, size_t* count) {
  if (!result) {
    if (count) *count = 0;
    return nullptr;
  }
  const auto& cps = result->outcome.segmentation.changepoints();
  if (count) *count = cps.size();
  return cps.data();
}

int64_t cpd_result_series_length(const cpd_result* result) {
  return result ? result->outcome.segmentation.n() : 0;
}

double cpd_result_objective(const cpd_result* result) {
  return result ? result->outcome.objective : std::numeric_limits<double>::quiet_NaN();
}

double cpd_result_beta(const cpd_result* result) {
  return result ? result->outcome.beta : std::numeric_limits<double>::quiet_NaN();
}

size_t cpd_result_num_segments(const cpd_result* result) {
  return result ? result->outcome.segmentation.segments().size() : 0;
}

cpd_status cpd_result_segment(const cpd_result* result, size_t index, cpd_segment* out) {
  if (!result || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  const auto& segments = result->outcome.segmentation.segments();
  if (index >= segments.size()) return fail(CPD_ERR_INVALID_ARGUMENT, "segment index out of range");
  copy_segment(segments[index], out);
  return CPD_OK;
}

const char* cpd_result_param_name(const cpd_result* result, size_t index, int32_t param_index) {
  if (!result || !result->model) return nullptr;
  const auto& segments = result->outcome.segmentation.segments();
  if (index >= segments.size()) return nullptr;
  const auto names = result->model->param_names(segments[index]);
  if (param_index < 0 || param_index >= static_cast<int32_t>(names.size())) return nullptr;
  result->name_buffer = names[param_index];
  return result->name_buffer.c_str();
}

cpd_status cpd_result_pruning(const cpd_result* result, int64_t* max_candidates,
                              double* mean_candidates) {
  if (!result) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  if (!result->outcome.pruning) {
    return fail(CPD_ERR_INVALID_ARGUMENT, "pruning statistics exist only for pelt results");
  }
  if (max_candidates) *max_candidates = result->outcome.pruning->max_candidates;
  if (mean_candidates) *mean_candidates = result->outcome.pruning->mean_candidates;
  return CPD_OK;
}

cpd_status cpd_result_iterations(const cpd_result* result, int64_t* iterations,
                                 int32_t* converged) {
  if (!result) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  if (!result->outcome.iterations) {
    return fail(CPD_ERR_INVALID_ARGUMENT, "iteration data exists only for concave penalties");
  }
  if (iterations) *iterations = *result->outcome.iterations;
  if (converged) {
    *converged = result->outcome.concave_status == cpd::ConcaveStatus::converged ? 1 : 0;
  }
  return CPD_OK;
}

cpd_status cpd_check_pruning(const cpd_series* series, const cpd_options* options,
                             uint64_t seed, int64_t trials, double tol, int64_t* violations) {
  if (!series || !options || !violations) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() {
    const auto model = cpd::make_cost_model(series->series, to_model_spec(options));
    *violations = cpd::check_pruning_inequality(*model, seed, trials, tol);
    return CPD_OK;
  });
}

void cpd_sim_design_init(cpd_sim_design* design) {
  if (!design) return;
  design->n = 1000;
  design->law = "variance";
  design->growth = "linear";
  design->m = -1;
  design->min_gap = 0;
  design->seed = 0;
}

cpd_status cpd_simulate(const cpd_sim_design* design, cpd_sim** out) {
  if (!design || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() {
    auto handle = std::make_unique<cpd_sim>(cpd_sim{cpd::generate_series(to_sim_design(design))});
    *out = handle.release();
    return CPD_OK;
  });
}

void cpd_sim_destroy(cpd_sim* sim) { delete sim; }

const double* cpd_sim_values(const cpd_sim* sim, size_t* count) {
  if (!sim) {
    if (count) *count = 0;
    return nullptr;
  }
  if (count) *count = sim->result.series.values().size();
  return sim->result.series.values().data();
}

const int64_t* cpd_sim_changepoints(const cpd_sim* sim, size_t* count) {
  if (!sim) {
    if (count) *count = 0;
    return nullptr;
  }
  if (count) *count = sim->result.changepoints.size();
  return sim->result.changepoints.data();
}

size_t cpd_sim_num_segments(const cpd_sim* sim) {
  return sim ? sim->result.segments.size() : 0;
}

cpd_status cpd_sim_segment(const cpd_sim* sim, size_t index, cpd_segment* out) {
  if (!sim || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  if (index >= sim->result.segments.size()) {
    return fail(CPD_ERR_INVALID_ARGUMENT, "segment index out of range");
  }
  copy_segment(sim->result.segments[index], out);
  return CPD_OK;
}

const double* cpd_sim_theta(const cpd_sim* sim, size_t* count) {
  if (!sim) {
    if (count) *count = 0;
    return nullptr;
  }
  if (count) *count = sim->result.theta.size();
  return sim->result.theta.data();
}

cpd_status cpd_evaluate(const cpd_sim* sim, const cpd_result* result, int64_t window,
                        const char* theta_rule, cpd_eval_report* out) {
  if (!sim || !result || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  const auto rule = parse_theta_rule(theta_rule);
  if (!rule) {
    return fail(CPD_ERR_INVALID_ARGUMENT,
                "unknown theta rule; expected none | variance | meanvar");
  }
  return guarded([&]() {
    const cpd::EvalReport report =
        cpd::evaluate(sim->result, result->outcome.segmentation, window, *rule);
    out->mse = report.mse;
    out->true_detected = report.true_detected;
    out->false_detected = report.false_detected;
    return CPD_OK;
  });
}

void cpd_bench_spec_init(cpd_bench_spec* spec) {
  if (!spec) return;
  spec->scenarios = nullptr;
  spec->num_scenarios = 0;
  spec->algorithms = "pelt,bs";
  spec->model = "var";
  spec->penalty = "sic";
  spec->p_max = 7;
  spec->mu = 0.0;
  spec->reps = 100;
  spec->seed = 1;
  spec->sn_max_changepoints = 20;
  spec->eval_window = 10;
  spec->theta_rule = "variance";
}

cpd_status cpd_bench_run(const cpd_bench_spec* spec, cpd_bench** out) {
  if (!spec || !out || !spec->scenarios) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() {
    cpd::BenchSpec bench;
    for (size_t i = 0; i < spec->num_scenarios; ++i) {
      bench.scenarios.push_back(to_sim_design(&spec->scenarios[i]));
    }
    if (spec->algorithms) {
      std::string_view all(spec->algorithms);
      while (!all.empty()) {
        const auto comma = all.find(',');
        const auto token = all.substr(0, comma);
        if (!token.empty()) bench.algorithms.emplace_back(token);
        if (comma == std::string_view::npos) break;
        all.remove_prefix(comma + 1);
      }
    }
    const auto kind = spec->model ? cpd::parse_model_kind(spec->model) : std::nullopt;
    if (!kind) {
      throw cpd::Error(cpd::ErrorCode::invalid_argument,
                       "unknown model; expected mean | var | meanvar | ar-mdl");
    }
    bench.model.kind = *kind;
    bench.model.p_max = spec->p_max;
    if (!std::isnan(spec->mu)) bench.model.mu = spec->mu;
    bench.penalty = spec->penalty ? spec->penalty : "sic";
    bench.reps = spec->reps;
    bench.seed = spec->seed;
    bench.sn_max_changepoints = spec->sn_max_changepoints;
    bench.eval_window = spec->eval_window;
    const auto rule = parse_theta_rule(spec->theta_rule);
    if (!rule) {
      throw cpd::Error(cpd::ErrorCode::invalid_argument,
                       "unknown theta rule; expected none | variance | meanvar");
    }
    bench.theta_rule = *rule;

    auto handle = std::make_unique<cpd_bench>(cpd_bench{cpd::run_benchmark(bench)});
    *out = handle.release();
    return CPD_OK;
  });
}

void cpd_bench_destroy(cpd_bench* bench) { delete bench; }

size_t cpd_bench_num_rows(const cpd_bench* bench) {
  return bench ? bench->result.rows.size() : 0;
}

cpd_status cpd_bench_row_get(const cpd_bench* bench, size_t index, cpd_bench_row* out) {
  if (!bench || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  if (index >= bench->result.rows.size()) {
    return fail(CPD_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const cpd::BenchRow& row = bench->result.rows[index];
  copy_string(row.scenario, out->scenario, sizeof out->scenario);
  out->n = row.n;
  out->m_true = row.m_true;
  copy_string(row.algorithm, out->algorithm, sizeof out->algorithm);
  out->rep = row.rep;
  out->runtime_s = row.runtime_s;
  out->cost = row.cost;
  out->mse = row.mse;
  out->true_detected = row.true_detected;
  out->false_detected = row.false_detected;
  out->cost_gap = row.cost_gap;
  out->ok = row.ok ? 1 : 0;
  copy_string(row.error, out->error, sizeof out->error);
  return CPD_OK;
}

size_t cpd_bench_num_groups(const cpd_bench* bench) {
  return bench ? bench->result.groups.size() : 0;
}

cpd_status cpd_bench_group_get(const cpd_bench* bench, size_t index, cpd_bench_group* out) {
  if (!bench || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  if (index >= bench->result.groups.size()) {
    return fail(CPD_ERR_INVALID_ARGUMENT, "group index out of range");
  }
  const cpd::BenchGroup& g = bench->result.groups[index];
  copy_string(g.scenario, out->scenario, sizeof out->scenario);
  copy_string(g.algorithm, out->algorithm, sizeof out->algorithm);
  out->n = g.n;
  out->reps_ok = g.reps_ok;
  out->mean_runtime_s = g.mean_runtime_s;
  out->se_runtime_s = g.se_runtime_s;
  out->mean_cost = g.mean_cost;
  out->mean_mse = g.mean_mse;
  out->se_mse = g.se_mse;
  out->mean_true_detected = g.mean_true_detected;
  out->mean_false_detected = g.mean_false_detected;
  out->mean_cost_gap = g.mean_cost_gap;
  return CPD_OK;
}

cpd_status cpd_bench_csv(const cpd_bench* bench, char** out) {
  if (!bench || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() { return string_out(cpd::bench_csv(bench->result), out); });
}

cpd_status cpd_bench_summary(const cpd_bench* bench, char** out) {
  if (!bench || !out) return fail(CPD_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&]() { return string_out(cpd::bench_summary(bench->result), out); });
}

void cpd_string_free(char* s) { std::free(s); }

}  // extern "C"

// Command-line front end. Talks to the library exclusively through the C API.
//
// Exit codes: 0 success, 1 usage or detection error, 2 unreadable input,
// 3 non-finite input values, 4 infeasible configuration.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpdetect.h"

using ordered_json = nlohmann::ordered_json;

namespace {

int status_exit_code(cpd_status status) {
  switch (status) {
    case CPD_ERR_NONFINITE_DATA: return 3;
    case CPD_ERR_INFEASIBLE: return 4;
    default: return 1;
  }
}

int report_failure(const std::string& context, cpd_status status) {
  std::cerr << "error: " << context << ": " << cpd_last_error() << "\n";
  return status_exit_code(status);
}

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trimmed(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(const std::string& token, double* out) {
  if (token.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) return false;
  *out = v;
  return true;
}

struct SeriesInput {
  std::vector<double> values;
  std::vector<std::size_t> nonfinite_lines;
};

// Reads one value per line, or one CSV column selected by name or 1-based
// index. Returns an exit code; 0 on success.
int read_series_file(const std::string& path, const std::string& column, SeriesInput* out) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) {
      std::cerr << "error: cannot open '" << path << "'\n";
      return 2;
    }
    in = &file;
  }

  std::size_t column_index = 0;  // 0-based
  bool expect_header = false;
  if (!column.empty()) {
    char* end = nullptr;
    const long idx = std::strtol(column.c_str(), &end, 10);
    if (end == column.c_str() + column.size()) {
      if (idx < 1) {
        std::cerr << "error: column index must be at least 1\n";
        return 2;
      }
      column_index = static_cast<std::size_t>(idx - 1);
    } else {
      expect_header = true;  // resolved from the header row below
    }
  }

  std::string line;
  std::size_t line_no = 0;
  bool header_done = !expect_header;
  bool skipped_header = false;
  while (std::getline(*in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    const auto fields = split_csv_line(line);

    if (!header_done) {
      bool found = false;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == column) {
          column_index = i;
          found = true;
          break;
        }
      }
      if (!found) {
        std::cerr << "error: no column named '" << column << "' in the header of '" << path
                  << "'\n";
        return 2;
      }
      header_done = true;
      continue;
    }

    if (column_index >= fields.size()) {
      std::cerr << "error: line " << line_no << " has no column " << column_index + 1 << "\n";
      return 2;
    }
    double v = 0.0;
    if (!parse_double(fields[column_index], &v)) {
      // A lone non-numeric first data row doubles as a header.
      if (out->values.empty() && out->nonfinite_lines.empty() && !expect_header &&
          !skipped_header) {
        skipped_header = true;
        continue;
      }
      std::cerr << "error: line " << line_no << ": cannot parse '" << fields[column_index]
                << "' as a number\n";
      return 2;
    }
    if (!std::isfinite(v)) out->nonfinite_lines.push_back(line_no);
    out->values.push_back(v);
  }
  if (out->values.empty()) {
    std::cerr << "error: no numeric values found in '" << path << "'\n";
    return 2;
  }
  return 0;
}

int reject_nonfinite(const SeriesInput& input) {
  if (input.nonfinite_lines.empty()) return 0;
  std::cerr << "error: non-finite values on line(s):";
  std::size_t shown = 0;
  for (std::size_t ln : input.nonfinite_lines) {
    if (shown++ == 20) {
      std::cerr << " ... (" << input.nonfinite_lines.size() << " total)";
      break;
    }
    std::cerr << ' ' << ln;
  }
  std::cerr << "\n";
  return 3;
}

struct SeriesHandle {
  cpd_series* ptr = nullptr;
  ~SeriesHandle() { cpd_series_destroy(ptr); }
};
struct ResultHandle {
  cpd_result* ptr = nullptr;
  ~ResultHandle() { cpd_result_destroy(ptr); }
};
struct SimHandle {
  cpd_sim* ptr = nullptr;
  ~SimHandle() { cpd_sim_destroy(ptr); }
};
struct BenchHandle {
  cpd_bench* ptr = nullptr;
  ~BenchHandle() { cpd_bench_destroy(ptr); }
};

ordered_json segment_to_json(const cpd_result* result, std::size_t index,
                             const cpd_segment& seg) {
  ordered_json j;
  j["start"] = seg.start;
  j["end"] = seg.end;
  j["cost"] = seg.cost;
  if (seg.ar_order >= 0) j["ar_order"] = seg.ar_order;
  ordered_json params;
  for (int32_t p = 0; p < seg.num_params; ++p) {
    const char* name = cpd_result_param_name(result, index, p);
    params[name ? name : ("p" + std::to_string(p))] = seg.params[p];
  }
  j["params"] = std::move(params);
  return j;
}

int write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return 1;
  }
  file << text;
  return file.good() ? 0 : 1;
}

struct DetectArgs {
  std::string input;
  std::string column;
  std::string model = "meanvar";
  std::string penalty = "sic";
  std::string algorithm = "pelt";
  std::int32_t p_max = 7;
  double mu = std::numeric_limits<double>::quiet_NaN();
  std::int64_t min_segment = 0;
  std::int64_t sn_q = 20;
  std::int32_t max_iterations = 20;
  int diff = 0;
  bool verify_pruning = false;
  std::string out_path;
};

int run_detect(const DetectArgs& args) {
  SeriesInput input;
  if (const int rc = read_series_file(args.input, args.column, &input)) return rc;
  if (const int rc = reject_nonfinite(input)) return rc;

  SeriesHandle series;
  cpd_status status = cpd_series_create(input.values.data(), input.values.size(), &series.ptr);
  if (status != CPD_OK) return report_failure("building series", status);

  if (args.diff > 0) {
    SeriesHandle diffed;
    status = cpd_series_diff(series.ptr, args.diff, &diffed.ptr);
    if (status != CPD_OK) return report_failure("differencing", status);
    std::swap(series.ptr, diffed.ptr);
  }

  cpd_options options;
  cpd_options_init(&options);
  options.model = args.model.c_str();
  options.penalty = args.penalty.c_str();
  options.algorithm = args.algorithm.c_str();
  options.p_max = args.p_max;
  options.mu = args.mu;
  options.min_segment = args.min_segment;
  options.sn_max_changepoints = args.sn_q;
  options.max_iterations = args.max_iterations;

  if (args.verify_pruning) {
    int64_t violations = 0;
    status = cpd_check_pruning(series.ptr, &options, 1, 1000, 1e-9, &violations);
    if (status != CPD_OK) return report_failure("checking the pruning inequality", status);
    if (violations > 0) {
      std::cerr << "warning: pruning inequality violated on " << violations
                << "/1000 sampled splits; pelt may prune the optimum here\n";
    }
  }

  ResultHandle result;
  status = cpd_detect(series.ptr, &options, &result.ptr);
  if (status != CPD_OK) return report_failure("detection", status);

  ordered_json j;
  j["convention"] = "change-after-index";
  j["algorithm"] = args.algorithm;
  j["model"] = args.model;
  j["penalty"] = args.penalty;
  j["n"] = cpd_result_series_length(result.ptr);
  if (args.diff > 0) j["diff"] = args.diff;

  const double beta = cpd_result_beta(result.ptr);
  if (!std::isnan(beta)) j["beta"] = beta;

  size_t num_cps = 0;
  const int64_t* cps = cpd_result_changepoints(result.ptr, &num_cps);
  j["num_changepoints"] = num_cps;
  j["changepoints"] = std::vector<int64_t>(cps, cps + num_cps);
  j["total_cost"] = cpd_result_objective(result.ptr);

  ordered_json segments = ordered_json::array();
  const size_t num_segments = cpd_result_num_segments(result.ptr);
  for (size_t i = 0; i < num_segments; ++i) {
    cpd_segment seg;
    if (cpd_result_segment(result.ptr, i, &seg) == CPD_OK) {
      segments.push_back(segment_to_json(result.ptr, i, seg));
    }
  }
  j["segments"] = std::move(segments);

  int64_t max_candidates = 0;
  double mean_candidates = 0.0;
  if (cpd_result_pruning(result.ptr, &max_candidates, &mean_candidates) == CPD_OK) {
    j["pruning"] = {{"max_candidates", max_candidates}, {"mean_candidates", mean_candidates}};
  }
  int64_t iterations = 0;
  int32_t converged = 0;
  if (cpd_result_iterations(result.ptr, &iterations, &converged) == CPD_OK) {
    j["iterations"] = iterations;
    j["converged"] = converged != 0;
  }

  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!args.out_path.empty()) {
    if (const int rc = write_text(args.out_path, text)) return rc;
  }
  return 0;
}

struct SimulateArgs {
  std::int64_t n = 1000;
  std::string law = "variance";
  std::string growth = "linear";
  std::int64_t m = -1;
  std::int64_t min_gap = 0;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
  cpd_sim_design design;
  cpd_sim_design_init(&design);
  design.n = args.n;
  design.law = args.law.c_str();
  design.growth = args.m >= 0 ? "explicit" : args.growth.c_str();
  design.m = args.m;
  design.min_gap = args.min_gap;
  design.seed = args.seed;

  SimHandle sim;
  const cpd_status status = cpd_simulate(&design, &sim.ptr);
  if (status != CPD_OK) return report_failure("simulation", status);

  size_t count = 0;
  const double* values = cpd_sim_values(sim.ptr, &count);
  std::ostringstream csv;
  char buf[48];
  for (size_t i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    csv << buf << '\n';
  }
  if (const int rc = write_text(args.out_path, csv.str())) return rc;

  ordered_json truth;
  truth["convention"] = "change-after-index";
  truth["law"] = args.law;
  truth["n"] = args.n;
  truth["seed"] = args.seed;
  size_t num_cps = 0;
  const int64_t* cps = cpd_sim_changepoints(sim.ptr, &num_cps);
  truth["num_changepoints"] = num_cps;
  truth["changepoints"] = std::vector<int64_t>(cps, cps + num_cps);
  ordered_json segments = ordered_json::array();
  const size_t num_segments = cpd_sim_num_segments(sim.ptr);
  for (size_t i = 0; i < num_segments; ++i) {
    cpd_segment seg;
    if (cpd_sim_segment(sim.ptr, i, &seg) != CPD_OK) continue;
    ordered_json sj;
    sj["start"] = seg.start;
    sj["end"] = seg.end;
    if (seg.ar_order >= 0) {
      sj["ar_order"] = seg.ar_order;
      std::vector<double> phi(seg.params, seg.params + seg.ar_order);
      sj["phi"] = phi;
      sj["innovation_variance"] = seg.params[seg.num_params - 1];
    } else {
      sj["variance"] = seg.params[0];
    }
    segments.push_back(std::move(sj));
  }
  truth["segments"] = std::move(segments);

  if (const int rc = write_text(args.out_path + ".truth.json", truth.dump(2) + "\n")) return rc;
  std::cout << "wrote " << count << " values to " << args.out_path << " and truth to "
            << args.out_path << ".truth.json\n";
  return 0;
}

struct BenchArgs {
  std::string law = "variance";
  std::string growth = "linear";
  std::vector<std::int64_t> n_list;
  std::int64_t m = -1;
  std::int64_t min_gap = 0;
  std::string algorithms = "pelt,bs";
  std::string model = "var";
  std::string penalty = "sic";
  std::int32_t p_max = 7;
  double mu = 0.0;
  std::int64_t reps = 100;
  std::uint64_t seed = 1;
  std::int64_t sn_q = 20;
  std::int64_t window = 10;
  std::string theta;
  std::string out_path;
};

int run_bench(const BenchArgs& args) {
  std::vector<cpd_sim_design> scenarios;
  for (std::int64_t n : args.n_list) {
    cpd_sim_design d;
    cpd_sim_design_init(&d);
    d.n = n;
    d.law = args.law.c_str();
    d.growth = args.m >= 0 ? "explicit" : args.growth.c_str();
    d.m = args.m;
    d.min_gap = args.min_gap;
    scenarios.push_back(d);
  }

  cpd_bench_spec spec;
  cpd_bench_spec_init(&spec);
  spec.scenarios = scenarios.data();
  spec.num_scenarios = scenarios.size();
  spec.algorithms = args.algorithms.c_str();
  spec.model = args.model.c_str();
  spec.penalty = args.penalty.c_str();
  spec.p_max = args.p_max;
  spec.mu = args.mu;
  spec.reps = args.reps;
  spec.seed = args.seed;
  spec.sn_max_changepoints = args.sn_q;
  spec.eval_window = args.window;
  std::string theta = args.theta;
  if (theta.empty()) theta = args.law == "variance" ? "variance" : "none";
  spec.theta_rule = theta.c_str();

  BenchHandle bench;
  cpd_status status = cpd_bench_run(&spec, &bench.ptr);
  if (status != CPD_OK) return report_failure("benchmark", status);

  char* csv = nullptr;
  status = cpd_bench_csv(bench.ptr, &csv);
  if (status != CPD_OK) return report_failure("formatting rows", status);
  char* summary = nullptr;
  status = cpd_bench_summary(bench.ptr, &summary);
  if (status != CPD_OK) {
    cpd_string_free(csv);
    return report_failure("formatting summary", status);
  }

  int rc = 0;
  if (args.out_path.empty() || args.out_path == "-") {
    std::cout << csv;
    std::cerr << summary;
  } else {
    rc = write_text(args.out_path, csv);
    if (rc == 0) std::cout << summary;
  }
  cpd_string_free(csv);
  cpd_string_free(summary);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact multiple-changepoint detection (pelt, op, bs, sn)"};
  app.require_subcommand(1);

  DetectArgs det;
  CLI::App* detect = app.add_subcommand("detect", "Detect changepoints in a series");
  detect->add_option("--input,-i", det.input, "Input file, one value per line or CSV (- for stdin)")
      ->required();
  detect->add_option("--column,-c", det.column, "CSV column to read (name or 1-based index)");
  detect->add_option("--model", det.model, "mean | var | meanvar | ar-mdl");
  detect->add_option("--penalty", det.penalty,
                     "sic | aic | manual:<value> | concave:sqrt | concave:log | mdl");
  detect->add_option("--algorithm", det.algorithm, "pelt | op | bs | sn");
  detect->add_option("--p-max", det.p_max, "ar-mdl: largest candidate order");
  detect->add_option("--mu", det.mu, "var: fixed known mean (default: sample mean)");
  detect->add_option("--min-seg", det.min_segment, "Minimum segment length (raise-only)");
  detect->add_option("--Q,--sn-max", det.sn_q, "sn: largest changepoint count");
  detect->add_option("--max-iters", det.max_iterations, "Concave penalties: iteration cap");
  detect->add_option("--diff", det.diff, "Apply first differences this many times");
  detect->add_flag("--verify-k", det.verify_pruning,
                   "Sample split triples and warn if the pruning inequality fails");
  detect->add_option("--out,-o", det.out_path, "Also write the JSON result to this file");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a test series with known truth");
  simulate->add_option("--n", sim.n, "Series length")->required();
  simulate->add_option("--law", sim.law, "variance | ar");
  simulate->add_option("--growth", sim.growth, "linear | sqrt | fixed");
  simulate->add_option("--m", sim.m, "Explicit changepoint count (overrides --growth)");
  simulate->add_option("--min-gap", sim.min_gap, "Minimum spacing (default: law-specific)");
  simulate->add_option("--seed", sim.seed, "Generator seed");
  simulate->add_option("--out,-o", sim.out_path,
                       "Values file; truth goes to <out>.truth.json")
      ->required();

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run simulation benchmarks");
  bench_cmd->add_option("--n", bench.n_list, "Series lengths (repeat or comma-separate)")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--law", bench.law, "variance | ar");
  bench_cmd->add_option("--growth", bench.growth, "linear | sqrt | fixed");
  bench_cmd->add_option("--m", bench.m, "Explicit changepoint count (overrides --growth)");
  bench_cmd->add_option("--min-gap", bench.min_gap, "Minimum spacing (default: law-specific)");
  bench_cmd->add_option("--algorithms", bench.algorithms,
                        "Comma-separated: pelt, op, bs, sn, subbs");
  bench_cmd->add_option("--model", bench.model, "mean | var | meanvar | ar-mdl");
  bench_cmd->add_option("--penalty", bench.penalty, "Penalty spec (as in detect)");
  bench_cmd->add_option("--p-max", bench.p_max, "ar-mdl: largest candidate order");
  bench_cmd->add_option("--mu", bench.mu, "var: fixed known mean (default 0 here)");
  bench_cmd->add_option("--reps", bench.reps, "Replications per scenario");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--Q,--sn-max", bench.sn_q, "sn: largest changepoint count");
  bench_cmd->add_option("--window", bench.window, "Changepoint matching window");
  bench_cmd->add_option("--theta", bench.theta, "MSE rule: none | variance | meanvar");
  bench_cmd->add_option("--out,-o", bench.out_path, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (detect->parsed()) return run_detect(det);
  if (simulate->parsed()) return run_simulate(sim);
  if (bench_cmd->parsed()) return run_bench(bench);
  return 1;
}

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cpdetect/penalty.hpp"

namespace cpd {

enum class Algorithm { pelt, op, bs, sn };

const char* algorithm_name(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

struct DetectConfig {
  std::string penalty = "sic";
  Algorithm algorithm = Algorithm::pelt;
  std::int64_t sn_max_changepoints = 20;
  // bs only: force exactly this many best-first splits, skipping the
  // acceptance test.
  std::optional<std::int64_t> bs_max_changepoints;
  int max_iterations = 20;  // concave penalties
  bool annotate_segments = true;
};

struct DetectOutcome {
  explicit DetectOutcome(Segmentation seg) : segmentation(std::move(seg)) {}

  Segmentation segmentation;
  double objective = 0.0;
  // Constant penalty value; NaN for concave schemes (see gamma_final).
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::string penalty_name;
  std::optional<PruningStats> pruning;         // pelt
  std::optional<std::int64_t> iterations;      // concave penalties
  std::optional<ConcaveStatus> concave_status;
  std::optional<double> gamma_final;
  std::optional<std::int64_t> sn_selected_m;   // sn
};

// One detection run: parses the penalty, dispatches to the requested search,
// and annotates the result's segments with fitted parameters. Concave
// penalties are valid only with pelt (iterative) and sn (exact).
DetectOutcome run_detection(const CostModel& model, const DetectConfig& config);

}  // namespace cpd

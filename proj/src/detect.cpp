#include "cpdetect/detect.hpp"

namespace cpd {

const char* algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::pelt: return "pelt";
    case Algorithm::op: return "op";
    case Algorithm::bs: return "bs";
    case Algorithm::sn: return "sn";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "pelt") return Algorithm::pelt;
  if (name == "op") return Algorithm::op;
  if (name == "bs") return Algorithm::bs;
  if (name == "sn") return Algorithm::sn;
  return std::nullopt;
}

DetectOutcome run_detection(const CostModel& model, const DetectConfig& config) {
  const PenaltyScheme scheme = parse_penalty_spec(config.penalty, model);
  if (config.bs_max_changepoints && config.algorithm != Algorithm::bs) {
    throw_invalid("a forced changepoint count applies to binary segmentation only");
  }

  DetectOutcome out(Segmentation({}, model.n(), std::numeric_limits<double>::quiet_NaN()));
  out.penalty_name = scheme.name();

  if (scheme.is_constant()) {
    const double beta = scheme.beta();
    out.beta = beta;
    switch (config.algorithm) {
      case Algorithm::pelt: {
        DPResult r = pelt(model, beta);
        out.pruning = std::move(r.pruning);
        out.segmentation = std::move(r.segmentation);
        break;
      }
      case Algorithm::op: {
        DPResult r = optimal_partitioning(model, beta);
        out.segmentation = std::move(r.segmentation);
        break;
      }
      case Algorithm::bs:
        out.segmentation = binary_segmentation(model, beta, config.bs_max_changepoints);
        break;
      case Algorithm::sn: {
        PenalizedOptimum opt =
            exact_penalized_optimum(model, scheme, config.sn_max_changepoints);
        out.sn_selected_m = opt.num_changepoints;
        out.segmentation = std::move(opt.segmentation);
        break;
      }
    }
  } else {
    switch (config.algorithm) {
      case Algorithm::pelt: {
        ConcaveResult r = concave_iteration(model, scheme, config.max_iterations);
        out.iterations = r.iterations();
        out.concave_status = r.status;
        out.gamma_final = r.trace.back().gamma;
        out.segmentation = std::move(r.segmentation);
        break;
      }
      case Algorithm::sn: {
        PenalizedOptimum opt =
            exact_penalized_optimum(model, scheme, config.sn_max_changepoints);
        out.sn_selected_m = opt.num_changepoints;
        out.segmentation = std::move(opt.segmentation);
        break;
      }
      default:
        throw_invalid(std::string("penalty '") + scheme.name() +
                      "' requires an iterative or exact-enumeration algorithm (pelt or sn)");
    }
  }

  out.objective = out.segmentation.total_cost();

  if (config.annotate_segments) {
    const auto b = out.segmentation.boundaries();
    std::vector<SegmentInfo> segments;
    segments.reserve(b.size() - 1);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      segments.push_back(model.fit_segment(b[i], b[i + 1]));
    }
    out.segmentation.set_segments(std::move(segments));
  }
  return out;
}

}  // namespace cpd

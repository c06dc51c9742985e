// SPDX-License-Identifier: Apache-2.0
#include "gap/gt_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gap/errors.hpp"

namespace gap {

void validate_instance(const GroundTruthInstance& gt, const TemporalGrid& grid) {
  if (!(gt.start_sec >= 0.0 && gt.start_sec < gt.end_sec && gt.end_sec <= grid.duration_sec()))
    throw ParameterError("ground-truth segment [" + std::to_string(gt.start_sec) + ", " +
                         std::to_string(gt.end_sec) + "] invalid for duration " +
                         std::to_string(grid.duration_sec()));
}

std::pair<double, double> downsample_gt(const GroundTruthInstance& gt, const TemporalGrid& grid) {
  validate_instance(gt, grid);
  return {to_snippet(gt.start_sec, grid).value, to_snippet(gt.end_sec, grid).value};
}

std::int64_t quantize_point(double position, QuantizeMode mode) {
  if (!(position >= 0.0) || !std::isfinite(position))
    throw RangeError("cannot quantize position " + std::to_string(position));
  switch (mode) {
    case QuantizeMode::floor:
      return static_cast<std::int64_t>(std::floor(position));
    case QuantizeMode::ceil:
      return static_cast<std::int64_t>(std::ceil(position));
    case QuantizeMode::round:
      return static_cast<std::int64_t>(std::round(position));  // half away from zero
  }
  return 0;
}

BoundaryHeatmap synthesize_heatmap(double center, std::int64_t num_snippets, double sigma) {
  if (num_snippets < 1) throw ShapeError("heatmap needs at least one snippet");
  if (!(sigma > 0.0)) throw ParameterError("heatmap sigma must be positive");
  const double last = static_cast<double>(num_snippets - 1);
  if (!(center >= 0.0 && center <= last))
    throw RangeError("heatmap center " + std::to_string(center) + " outside [0, " +
                     std::to_string(last) + "]");

  const double denom = 2.0 * sigma * sigma;
  Eigen::VectorXd values(num_snippets);
  for (std::int64_t x = 0; x < num_snippets; ++x) {
    const double d = static_cast<double>(x) - center;
    values(x) = std::exp(-d * d / denom);
  }
  values /= values.maxCoeff();
  values = values.cwiseMax(std::numeric_limits<double>::min());
  return {std::move(values), center, sigma};
}

TrainingTargets make_training_targets(const GroundTruthInstance& gt, const TemporalGrid& grid,
                                      double sigma, bool calibrated, QuantizeMode mode) {
  const auto [s, e] = downsample_gt(gt, grid);
  const double last = grid.last_index();
  // The end of the video maps to T, one past the last snippet.
  const double s_q = std::min(static_cast<double>(quantize_point(s, mode)), last);
  const double e_q = std::min(static_cast<double>(quantize_point(e, mode)), last);
  const double s_c = std::min(s, last);
  const double e_c = std::min(e, last);

  TrainingTargets out;
  if (calibrated) {
    out.start = synthesize_heatmap(s_c, grid.num_snippets(), sigma);
    out.end = synthesize_heatmap(e_c, grid.num_snippets(), sigma);
  } else {
    out.start = synthesize_heatmap(s_q, grid.num_snippets(), sigma);
    out.end = synthesize_heatmap(e_q, grid.num_snippets(), sigma);
    out.start_error = std::abs(s - s_q);
    out.end_error = std::abs(e - e_q);
  }
  return out;
}

}  // namespace gap

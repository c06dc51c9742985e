// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth boundary targets on the snippet grid. Annotated boundaries in
// seconds are divided by the grid's seconds-per-snippet; the conventional
// pipeline then quantizes the result and draws a Gaussian heatmap around the
// integer position. The calibrated variant draws the heatmap around the
// continuous position instead.
#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "gap/grid.hpp"

namespace gap {

/// Annotated action interval in seconds.
struct GroundTruthInstance {
  double start_sec = 0.0;
  double end_sec = 0.0;
  std::string label;
};

/// Peak-normalized Gaussian target over the T snippets.
struct BoundaryHeatmap {
  Eigen::VectorXd values;
  double center = 0.0;
  double sigma = 1.0;
};

/// Throws ParameterError unless 0 <= start < end <= duration.
void validate_instance(const GroundTruthInstance& gt, const TemporalGrid& grid);

/// Continuous (start, end) in snippet units.
std::pair<double, double> downsample_gt(const GroundTruthInstance& gt, const TemporalGrid& grid);

std::int64_t quantize_point(double position, QuantizeMode mode);

/// exp(-(x - center)^2 / (2 sigma^2)) at x = 0..T-1, divided by its largest
/// tap. Taps that would underflow are held at the smallest normal double.
BoundaryHeatmap synthesize_heatmap(double center, std::int64_t num_snippets, double sigma);

struct TrainingTargets {
  BoundaryHeatmap start;
  BoundaryHeatmap end;
  /// |g' - g''| per endpoint for the quantized variant, 0 when calibrated.
  double start_error = 0.0;
  double end_error = 0.0;
};

TrainingTargets make_training_targets(const GroundTruthInstance& gt, const TemporalGrid& grid,
                                      double sigma, bool calibrated, QuantizeMode mode);

}  // namespace gap

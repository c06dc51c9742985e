// SPDX-License-Identifier: Apache-2.0
//
// Synthetic detector output with known continuous ground truth.
//
// Each video gets non-overlapping action instances drawn in seconds. For a
// given snippet count T the boundary curves are peak-normalized Gaussians at
// the exact (non-quantized) boundary positions, combined by pointwise max and
// corrupted with clamped additive noise. Baseline proposals are the ground
// truth boundaries snapped onto the integer grid, so the only error a
// baseline carries is temporal quantization.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gap/curve_refine.hpp"
#include "gap/evaluation.hpp"
#include "gap/gt_calibration.hpp"
#include "gap/proposal_pipeline.hpp"

namespace gap {

struct SynthScenario {
  std::size_t num_videos = 100;
  std::pair<double, double> duration_range_sec{60.0, 240.0};
  std::pair<int, int> instances_per_video{1, 3};
  std::vector<std::int64_t> snippet_counts{100};
  double curve_sigma = 2.0;  // snippets
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  int num_classes = 3;
  int distractors_per_video = 0;
  /// Minimum gap between any two boundaries, and between a boundary and the
  /// video edges, in snippets of the coarsest grid.
  double min_separation_snippets = 2.0;
  QuantizeMode baseline_mode = QuantizeMode::round;

  void validate() const;
};

struct SynthVideo {
  VideoPredictions predictions;
  std::vector<GroundTruthInstance> ground_truth;
};

struct SynthDataset {
  std::int64_t num_snippets;
  std::vector<SynthVideo> videos;
};

/// Ground truth depends only on (seed, video index); noise also on T. Videos
/// are therefore identical across snippet counts.
SynthDataset generate_at(const SynthScenario& scenario, std::int64_t num_snippets);

/// One dataset per entry of scenario.snippet_counts.
std::vector<SynthDataset> generate(const SynthScenario& scenario);

/// |predicted - true| per boundary in snippets, for the proposals that stem
/// from a ground-truth instance (id < number of instances).
std::vector<double> boundary_errors(const SynthVideo& truth, const VideoPredictions& predicted);

DetectionsByVideo to_detections(const std::vector<VideoPredictions>& videos);
GroundTruthByVideo to_ground_truth(const SynthDataset& data);

struct SweepRow {
  std::int64_t num_snippets;
  QuantizeMode mode;
  bool gap;
  bool smoothing;
  double boundary_mae_snippets;
  double boundary_mae_sec;  // over matches at tIoU 0.5, NaN when there are none
  double average_map;       // ActivityNet threshold set
};

/// Every (T, baseline quantize mode, GAP off / on with and without smoothing) cell.
std::vector<SweepRow> run_sweep(const SynthScenario& scenario, const RefinementConfig& cfg);

}  // namespace gap

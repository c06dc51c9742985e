// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gap/curve_refine.hpp"
#include "gap/grid.hpp"

namespace gap {

/// One candidate action instance on the snippet axis.
struct Proposal {
  SnippetCoord start;
  SnippetCoord end;
  double score = 0.0;
  std::string label;
  bool start_refined = false;
  bool end_refined = false;
  bool crossing = false;  // refinement reverted because start >= end
  std::size_t id = 0;     // position in the source dump
};

/// One video's detector output.
struct VideoPredictions {
  std::string video_id;
  TemporalGrid grid = TemporalGrid::from_seconds(1.0, 2);
  std::optional<ScoreCurve<double>> start_curve;
  std::optional<ScoreCurve<double>> end_curve;
  std::vector<Proposal> proposals;
};

enum class RefineStatus { ok, missing_curves };

struct RefineOutcome {
  VideoPredictions video;
  RefineStatus status = RefineStatus::ok;
};

/// Refines every proposal's start against the start curve and its end against
/// the end curve. Without both curves the proposals pass through untouched.
RefineOutcome refine_proposals(const VideoPredictions& v, const RefinementConfig& cfg);

struct SecondsDetection {
  double start_sec;
  double end_sec;
  double score;
  std::string label;
  std::size_t id;
};

/// Maps proposals back to seconds, highest score first.
std::vector<SecondsDetection> recover_resolution(const VideoPredictions& v);

struct SoftNmsParams {
  double sigma = 0.5;
  double score_floor = 1e-4;
  std::size_t top_k = 100;
};

/// Gaussian Soft-NMS within each label: repeatedly keep the best remaining
/// proposal and decay its same-label neighbours by exp(-tIoU^2 / sigma).
/// Ties on score go to the earlier start, then the lower id.
std::vector<Proposal> soft_nms(std::vector<Proposal> props, const SoftNmsParams& params);

}  // namespace gap

// SPDX-License-Identifier: Apache-2.0
//
// Temporal detection metrics with ActivityNet evaluator semantics: per class,
// detections are ranked by score and each one is matched to the unmatched
// ground truth of the same video with the highest tIoU, provided that tIoU
// reaches the threshold. AP is the area under the precision envelope
// (all-point interpolation).
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gap/gt_calibration.hpp"

namespace gap {

struct Interval {
  double start;
  double end;
};

/// |a ∩ b| / |a ∪ b|. Throws ParameterError if either interval has start >= end.
double tiou(Interval a, Interval b);

/// A scored detection in seconds.
struct Detection {
  Interval segment;
  double score;
  std::string label;
};

using DetectionsByVideo = std::map<std::string, std::vector<Detection>>;
using GroundTruthByVideo = std::map<std::string, std::vector<GroundTruthInstance>>;

/// Benchmark threshold sets.
std::vector<double> anet_thresholds();    // 0.50:0.05:0.95
std::vector<double> thumos_thresholds();  // 0.3:0.1:0.7

/// Precision-envelope area for a ranked 0/1 hit list with `num_positives` ground truths.
double interpolated_ap(const std::vector<bool>& hits, std::size_t num_positives);

/// AP of one class at one threshold.
double average_precision(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                         const std::string& label, double threshold);

struct ThresholdMap {
  double threshold;
  double map;
};

struct MapResult {
  std::vector<ThresholdMap> per_threshold;
  double average_map = 0.0;
  std::vector<std::string> warnings;
};

MapResult mean_ap(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                  const std::vector<double>& thresholds);

struct MatchedPair {
  Interval pred;
  Interval gt;
};

/// One-to-one matches at `threshold` using the same greedy rule as mean_ap.
std::vector<MatchedPair> matched_pairs(const DetectionsByVideo& preds,
                                       const GroundTruthByVideo& gts, double threshold = 0.5);

/// Mean of (|d_start| + |d_end|) / 2 in seconds; nullopt for an empty set.
std::optional<double> boundary_mae(const std::vector<MatchedPair>& pairs);

struct FpBucket {
  int budget_multiple;
  std::size_t budget;  // predictions examined: sum over videos of min(k * G_v, N_v)
  std::size_t true_positive = 0;
  std::size_t localization_error = 0;  // best same-label tIoU in [0.1, threshold), or a duplicate
  std::size_t background_error = 0;    // best same-label tIoU below 0.1
};

/// False-positive profile over the top k * G_v predictions of every video.
std::vector<FpBucket> fp_profile(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                                 const std::vector<int>& budget_multiples, double threshold = 0.5);

struct DurationBucket {
  std::string name;
  std::size_t num_videos = 0;
  double average_map = 0.0;
};

/// Average mAP restricted to short (< short_cut), medium and long (>= long_cut) videos.
std::vector<DurationBucket> duration_breakdown(const DetectionsByVideo& preds,
                                               const GroundTruthByVideo& gts,
                                               const std::map<std::string, double>& durations,
                                               const std::vector<double>& thresholds,
                                               double short_cut = 30.0, double long_cut = 180.0);

struct EvalReport {
  std::vector<ThresholdMap> per_threshold_map;
  double average_map = 0.0;
  std::optional<double> boundary_mae_sec;
  std::vector<FpBucket> fp_profile;
  std::vector<DurationBucket> duration_buckets;
  std::vector<std::string> warnings;
};

/// mAP over `thresholds`, boundary MAE at tIoU 0.5 and, when durations are
/// given, the per-length breakdown.
EvalReport evaluate(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                    const std::vector<double>& thresholds,
                    const std::map<std::string, double>& durations = {});

}  // namespace gap
